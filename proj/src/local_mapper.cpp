#include <algorithm>
#include <chrono>

#include "localmap/error.hpp"
#include "localmap/mappers.hpp"

namespace localmap {

namespace {

Count smallest_prime_factor(Count n) {
  for (Count p = 2; p * p <= n; ++p)
    if (n % p == 0) return p;
  return n;
}

int local_rank(LoopDim d) {
  return static_cast<int>(std::find(kLocalDimOrder.begin(), kLocalDimOrder.end(), d) -
                          kLocalDimOrder.begin());
}

}  // namespace

// Phase 1: NVDLA-like arrays take C across columns and M across rows;
// Eyeriss-like arrays take Q across columns and S across rows.
SpatialAssignment local_parallelize(const ConvLayer& layer,
                                    const AcceleratorSpec& spec) {
  SpatialAssignment sp;
  if (spec.style == ArchStyle::NvdlaLike) {
    sp.x_dim = LoopDim::C;
    sp.y_dim = LoopDim::M;
  } else {
    sp.x_dim = LoopDim::Q;
    sp.y_dim = LoopDim::S;
  }
  sp.x_factor = std::min(layer.bound(sp.x_dim), spec.pe.n);
  sp.y_factor = std::min(layer.bound(sp.y_dim), spec.pe.m);
  return sp;
}

// Phase 2: grow each bounded level's tile, lowest level first, one smallest
// prime factor at a time in round-robin dim order while the three tensor
// tiles still fit. A dim that fails to grow stays blocked at that level since
// footprints only increase. The leftover residue goes to DRAM.
void local_assign(const ConvLayer& layer, const AcceleratorSpec& spec,
                  Mapping& mapping) {
  const int L = spec.num_levels();
  DimCounts residue{};
  for (LoopDim d : kAllDims)
    residue[idx(d)] = ceil_div(layer.bound(d), mapping.spatial.factor(d));

  for (int j = 0; j < L - 1; ++j) {
    const Count cap = *capacity_words(spec.levels[j], spec.word_bits);
    auto fits = [&] { return total_footprint(tile_bounds(mapping, layer, spec, j)) <= cap; };
    if (!fits()) {
      throw ModelError("architecture too small: level " + spec.levels[j].name +
                       " cannot hold the minimal tile");
    }
    std::array<bool, kNumDims> blocked{};
    bool progress = true;
    while (progress) {
      progress = false;
      for (LoopDim d : kLocalDimOrder) {
        if (blocked[idx(d)] || residue[idx(d)] == 1) continue;
        const Count p = smallest_prime_factor(residue[idx(d)]);
        Count& f = mapping.levels[j].factors[idx(d)];
        f *= p;
        if (fits()) {
          residue[idx(d)] /= p;
          progress = true;
        } else {
          f /= p;
          blocked[idx(d)] = true;
        }
      }
    }
  }
  for (LoopDim d : kAllDims) mapping.levels[L - 1].factors[idx(d)] = residue[idx(d)];
}

// Phase 3: larger factors innermost, ties in the fixed dim order.
void local_schedule(Mapping& mapping) {
  for (LevelTiling& lt : mapping.levels) {
    lt.order.clear();
    for (LoopDim d : kLocalDimOrder)
      if (lt.factor(d) > 1) lt.order.push_back(d);
    std::stable_sort(lt.order.begin(), lt.order.end(), [&](LoopDim a, LoopDim b) {
      if (lt.factor(a) != lt.factor(b)) return lt.factor(a) > lt.factor(b);
      return local_rank(a) < local_rank(b);
    });
  }
}

MapperResult local_map(const ConvLayer& layer, const AcceleratorSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  validate_layer(layer);
  Mapping m = trivial_mapping(spec.num_levels());
  m.spatial = local_parallelize(layer, spec);
  local_assign(layer, spec, m);
  local_schedule(m);

  MapperResult out;
  out.report = cost(layer, spec, m);
  out.mapping = std::move(m);
  out.candidates_evaluated = 1;
  out.elapsed = std::chrono::steady_clock::now() - start;
  return out;
}

}  // namespace localmap

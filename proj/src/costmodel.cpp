#include "localmap/costmodel.hpp"

#include <algorithm>

#include "localmap/error.hpp"

namespace localmap {

Count AccessCounts::level_total(int level) const {
  Count sum = 0;
  for (const ReadWrite& rw : levels[level]) sum += rw.reads + rw.writes;
  return sum;
}

namespace {

struct Loop {
  LoopDim dim;
  Count trip;
};

// Summed size of the union tiles over every index combination of the loops
// above the boundary, for one tensor. `extent` is the aggregated tile extent
// and `tiles` the number of tile positions for each dim.
Count tile_word_sum(const ConvLayer& layer, const DimCounts& extent,
                    const DimCounts& tiles, TensorId t) {
  auto nonempty = [&](LoopDim d) {
    return std::min(tiles[idx(d)], ceil_div(layer.bound(d), extent[idx(d)]));
  };
  auto window = [&](LoopDim out, LoopDim filt) {
    const Count no = nonempty(out), nf = nonempty(filt);
    return nf * layer.bound(out) + no * layer.bound(filt) - no * nf;
  };
  switch (t) {
    case TensorId::Weight:
      return tensor_size(layer, TensorId::Weight);
    case TensorId::Output:
      return tensor_size(layer, TensorId::Output);
    case TensorId::Input:
      return checked_mul(
          checked_mul(layer.bound(LoopDim::N), layer.bound(LoopDim::C)),
          checked_mul(window(LoopDim::P, LoopDim::R),
                      window(LoopDim::Q, LoopDim::S)));
  }
  return 0;
}

}  // namespace

AccessCounts analytic_accesses(const ConvLayer& layer,
                               const AcceleratorSpec& spec,
                               const Mapping& mapping) {
  const int L = spec.num_levels();
  AccessCounts acc(L);

  const Count macs = mac_count(layer);
  acc.at(0, TensorId::Weight).reads += macs;
  acc.at(0, TensorId::Input).reads += macs;
  acc.at(0, TensorId::Output).reads += macs;
  acc.at(0, TensorId::Output).writes += macs;

  for (int b = 0; b + 1 < L; ++b) {
    std::vector<Loop> above;
    for (int j = b + 1; j < L; ++j)
      for (LoopDim d : mapping.levels[j].order)
        above.push_back({d, mapping.levels[j].factor(d)});

    DimCounts extent{}, tiles{};
    for (LoopDim d : kAllDims) {
      extent[idx(d)] = tile_extent(mapping, spec, d, b, true);
      Count t = 1;
      for (int j = b + 1; j < L; ++j) {
        t = checked_mul(t, mapping.levels[j].factor(d));
        if (j + 1 < L) t = checked_mul(t, spatial_factor_at(mapping, spec, j, d));
      }
      tiles[idx(d)] = t;
    }

    for (TensorId t : kAllTensors) {
      auto first = std::find_if(above.begin(), above.end(),
                                [&](const Loop& l) { return is_relevant(t, l.dim); });
      Count refetch = 1;
      for (auto it = first; it != above.end(); ++it)
        if (!is_relevant(t, it->dim)) refetch = checked_mul(refetch, it->trip);

      Count replicas = 1;
      for (int j = b + 1; j + 1 < L; ++j)
        for (LoopDim d : kAllDims)
          if (!is_relevant(t, d))
            replicas = checked_mul(replicas, spatial_factor_at(mapping, spec, j, d));

      const Count words = checked_mul(checked_mul(refetch, replicas),
                                      tile_word_sum(layer, extent, tiles, t));
      if (t != TensorId::Output) {
        acc.at(b + 1, t).reads += words;
        acc.at(b, t).writes += words;
      } else {
        const Count fill = words - replicas * tensor_size(layer, TensorId::Output);
        acc.at(b + 1, t).reads += fill;
        acc.at(b, t).writes += fill;
        acc.at(b, t).reads += words;
        acc.at(b + 1, t).writes += words;
      }
    }
  }
  return acc;
}

CostReport cost_from_accesses(const ConvLayer& layer,
                              const AcceleratorSpec& spec,
                              const Mapping& mapping, AccessCounts accesses) {
  CostReport rep;
  const int L = spec.num_levels();
  const Count macs = mac_count(layer);
  const Count active = mapping.spatial.x_factor * mapping.spatial.y_factor;

  rep.energy_by_level.resize(static_cast<std::size_t>(L));
  rep.compute_cycles = ceil_div(macs, active);
  rep.cycles = rep.compute_cycles;
  double onchip = 0.0;
  for (int i = 0; i < L; ++i) {
    const Count total = accesses.level_total(i);
    rep.energy_by_level[i] = static_cast<double>(total) * spec.levels[i].energy_per_access;
    onchip += rep.energy_by_level[i];
    const Count per_cycle = std::max<Count>(
        1, spec.levels[i].width / spec.word_bits * physical_instances(spec, i));
    rep.cycles = std::max(rep.cycles, ceil_div(total, per_cycle));
  }
  rep.mac_energy_total = static_cast<double>(macs) * spec.mac_energy;
  rep.total_energy = onchip + rep.mac_energy_total;
  rep.utilization = utilization(mapping, spec);
  rep.accesses = std::move(accesses);
  return rep;
}

CostReport cost_unchecked(const ConvLayer& layer, const AcceleratorSpec& spec,
                          const Mapping& mapping) {
  return cost_from_accesses(layer, spec, mapping,
                            analytic_accesses(layer, spec, mapping));
}

CostReport cost(const ConvLayer& layer, const AcceleratorSpec& spec,
                const Mapping& mapping) {
  const auto errs = validate(mapping, layer, spec);
  if (!errs.empty()) {
    std::string msg = "invalid mapping:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ModelError(msg);
  }
  return cost_unchecked(layer, spec, mapping);
}

}  // namespace localmap

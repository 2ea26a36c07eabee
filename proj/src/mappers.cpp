#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <tuple>
#include <unordered_set>

#include "localmap/error.hpp"
#include "localmap/mappers.hpp"

namespace localmap {

bool better_candidate(double energy_a, const Mapping& a, double energy_b,
                      const Mapping& b) {
  if (energy_a != energy_b) return energy_a < energy_b;
  return to_text(a) < to_text(b);
}

namespace {

using D = LoopDim;

bool in(std::initializer_list<LoopDim> set, LoopDim d) {
  return std::find(set.begin(), set.end(), d) != set.end();
}

// True when every dim of `inner` precedes every dim of `outer` in `order`.
bool all_inside(const std::vector<LoopDim>& order,
                std::initializer_list<LoopDim> inner,
                std::initializer_list<LoopDim> outer) {
  bool seen_outer = false;
  for (LoopDim d : order) {
    if (in(outer, d)) seen_outer = true;
    else if (in(inner, d) && seen_outer) return false;
  }
  return true;
}

bool only_at_l0(const Mapping& m, LoopDim d) {
  if (m.spatial.factor(d) != 1) return false;
  for (std::size_t j = 1; j < m.levels.size(); ++j)
    if (m.levels[j].factor(d) != 1) return false;
  return true;
}

void move_inside(std::vector<LoopDim>& order, std::initializer_list<LoopDim> inner) {
  std::stable_partition(order.begin(), order.end(), [&](LoopDim d) { return in(inner, d); });
}

SampleConstraints constraints_for(Dataflow df) {
  SampleConstraints c;
  switch (df) {
    case Dataflow::WS:
      c.l0_only = {D::R, D::S};
      break;
    case Dataflow::OS:
      c.upto_l1 = {D::C, D::R, D::S};
      break;
    case Dataflow::RS:
      c.y_dim = D::S;
      c.l0_only = {D::R};
      break;
  }
  return c;
}

void conform_orders(Dataflow df, Mapping& m) {
  switch (df) {
    case Dataflow::WS:
      if (m.levels.size() > 1) move_inside(m.levels[1].order, {D::N, D::P, D::Q});
      break;
    case Dataflow::OS:
      for (std::size_t j = 0; j < std::min<std::size_t>(2, m.levels.size()); ++j)
        move_inside(m.levels[j].order, {D::C, D::R, D::S});
      break;
    case Dataflow::RS:
      break;
  }
}

}  // namespace

bool satisfies_dataflow(Dataflow df, const Mapping& m) {
  switch (df) {
    case Dataflow::WS:
      return only_at_l0(m, D::R) && only_at_l0(m, D::S) &&
             (m.levels.size() < 2 ||
              all_inside(m.levels[1].order, {D::N, D::P, D::Q}, {D::M, D::C}));
    case Dataflow::OS: {
      for (std::size_t j = 2; j < m.levels.size(); ++j)
        for (LoopDim d : {D::C, D::R, D::S})
          if (m.levels[j].factor(d) != 1) return false;
      for (std::size_t j = 0; j < std::min<std::size_t>(2, m.levels.size()); ++j)
        if (!all_inside(m.levels[j].order, {D::C, D::R, D::S}, {D::N, D::M, D::P, D::Q}))
          return false;
      return true;
    }
    case Dataflow::RS:
      return m.spatial.y_dim == D::S && only_at_l0(m, D::R);
  }
  return false;
}

MapperResult dataflow_search(const ConvLayer& layer,
                             const AcceleratorSpec& spec, Dataflow df,
                             Count budget, std::uint64_t seed) {
  if (budget < 1) throw ModelError("dataflow search needs budget >= 1");
  const auto start = std::chrono::steady_clock::now();
  validate_layer(layer);

  const SampleConstraints cons = constraints_for(df);
  const Count max_attempts = std::max<Count>(20'000, budget * 400);
  const Count max_stale = 5'000;  // consecutive draws without a new candidate

  Rng rng(seed);
  std::unordered_set<std::string> seen;
  std::optional<MapperResult> best;
  Count evaluated = 0, stale = 0;
  for (Count attempt = 0; attempt < max_attempts && evaluated < budget && stale < max_stale;
       ++attempt) {
    Mapping m = sample_candidate(layer, spec, rng, cons);
    conform_orders(df, m);
    ++stale;
    if (!validate(m, layer, spec).empty()) continue;
    if (!seen.insert(to_text(m)).second) continue;
    stale = 0;
    ++evaluated;
    CostReport rep = cost_unchecked(layer, spec, m);
    if (!best || better_candidate(rep.total_energy, m, best->report.total_energy, best->mapping)) {
      best = MapperResult{std::move(m), std::move(rep), 0, {}};
    }
  }
  if (!best) {
    throw ModelError("no valid " + std::string(dataflow_name(df)) +
                     " mapping found for layer '" + layer.name + "' on " + spec.name);
  }
  best->candidates_evaluated = evaluated;
  best->elapsed = std::chrono::steady_clock::now() - start;
  return *best;
}

// --- exhaustive ---------------------------------------------------------------

namespace {

using Wide = unsigned __int128;

BigCount to_big(Wide w) {
  BigCount out = 0;
  BigCount base = 1;
  while (w) {
    out += base * static_cast<unsigned>(w % 10);
    base *= 10;
    w /= 10;
  }
  return out;
}

Wide checked_add(Wide a, Wide b) {
  Wide out;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("map-space count overflow");
  return out;
}

Wide checked_mul_wide(Wide a, Wide b) {
  Wide out;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("map-space count overflow");
  return out;
}

// Every spatial assignment in canonical form, each once.
std::vector<SpatialAssignment> spatial_choices(const ConvLayer& layer,
                                               const AcceleratorSpec& spec) {
  std::set<std::tuple<int, Count, int, Count>> keys;
  for (LoopDim x : kAllDims)
    for (LoopDim y : kAllDims) {
      if (x == y) continue;
      for (Count fx = 1; fx <= std::min(layer.bound(x), spec.pe.n); ++fx)
        for (Count fy = 1; fy <= std::min(layer.bound(y), spec.pe.m); ++fy) {
          const SpatialAssignment c = canonical_spatial({x, fx, y, fy});
          keys.insert({idx(c.x_dim), c.x_factor, idx(c.y_dim), c.y_factor});
        }
    }
  std::vector<SpatialAssignment> out;
  for (auto [x, fx, y, fy] : keys)
    out.push_back({static_cast<LoopDim>(x), fx, static_cast<LoopDim>(y), fy});
  return out;
}

// Per mask of levels with factor > 1, the number of ordered factorizations
// of `n` into `parts` factors having exactly that mask.
std::vector<Wide> mask_counts(Count n, int parts) {
  std::vector<Wide> counts(std::size_t{1} << parts, 0);
  for (const auto& f : ordered_factorizations(n, parts)) {
    unsigned mask = 0;
    for (int j = 0; j < parts; ++j)
      if (f[j] > 1) mask |= 1u << j;
    ++counts[mask];
  }
  return counts;
}

// Histogram over (number of non-unit loops per level) after adding one dim.
using Histogram = std::map<std::vector<int>, Wide>;

Histogram add_dim(const Histogram& h, const std::vector<Wide>& masks, int parts) {
  Histogram out;
  for (const auto& [state, n] : h)
    for (unsigned mask = 0; mask < masks.size(); ++mask) {
      if (!masks[mask]) continue;
      auto next = state;
      for (int j = 0; j < parts; ++j)
        if (mask & (1u << j)) ++next[j];
      Wide& slot = out[next];
      slot = checked_add(slot, checked_mul_wide(n, masks[mask]));
    }
  return out;
}

Wide permutations_of(const Histogram& h) {
  Wide total = 0;
  for (const auto& [state, n] : h) {
    Wide perms = 1;
    for (int k : state)
      for (int i = 2; i <= k; ++i) perms *= static_cast<Wide>(i);
    total = checked_add(total, checked_mul_wide(n, perms));
  }
  return total;
}

}  // namespace

BigCount exhaustive_space_size(const ConvLayer& layer,
                               const AcceleratorSpec& spec) {
  const int L = spec.num_levels();
  std::map<std::pair<LoopDim, Count>, std::vector<Wide>> mask_cache;
  auto masks_for = [&](LoopDim d, Count residue) -> const std::vector<Wide>& {
    auto key = std::make_pair(d, residue);
    auto it = mask_cache.find(key);
    if (it == mask_cache.end()) it = mask_cache.emplace(key, mask_counts(residue, L)).first;
    return it->second;
  };

  // Histogram of the five dims that are not spatial, per (x, y) dim pair.
  std::map<std::pair<LoopDim, LoopDim>, Histogram> base_cache;
  Wide total = 0;
  for (const SpatialAssignment& sp : spatial_choices(layer, spec)) {
    auto key = std::make_pair(sp.x_dim, sp.y_dim);
    auto it = base_cache.find(key);
    if (it == base_cache.end()) {
      Histogram h{{std::vector<int>(static_cast<std::size_t>(L), 0), 1}};
      for (LoopDim d : kAllDims)
        if (d != sp.x_dim && d != sp.y_dim) h = add_dim(h, masks_for(d, layer.bound(d)), L);
      it = base_cache.emplace(key, std::move(h)).first;
    }
    Histogram h = add_dim(it->second, masks_for(sp.x_dim, ceil_div(layer.bound(sp.x_dim), sp.x_factor)), L);
    h = add_dim(h, masks_for(sp.y_dim, ceil_div(layer.bound(sp.y_dim), sp.y_factor)), L);
    total = checked_add(total, permutations_of(h));
  }
  return to_big(total);
}

MapperResult exhaustive_search(const ConvLayer& layer,
                               const AcceleratorSpec& spec, Count cap) {
  const auto start = std::chrono::steady_clock::now();
  validate_layer(layer);
  const BigCount space = exhaustive_space_size(layer, spec);
  if (space > cap) {
    const BigCount orders =
        mapspace_size(std::max(1, nontrivial_loops(layer)), spec.num_onchip_levels());
    throw ModelError("refusing exhaustive search: map-space has " + space.str() +
                     " candidates (loop orders alone: (" +
                     std::to_string(nontrivial_loops(layer)) + "!)^" +
                     std::to_string(spec.num_onchip_levels()) + " = " + orders.str() +
                     "), cap is " + std::to_string(cap));
  }

  const int L = spec.num_levels();
  std::optional<MapperResult> best;
  Count evaluated = 0;

  for (const SpatialAssignment& sp : spatial_choices(layer, spec)) {
    std::array<std::vector<std::vector<Count>>, kNumDims> options;
    for (LoopDim d : kAllDims)
      options[idx(d)] = ordered_factorizations(ceil_div(layer.bound(d), sp.factor(d)), L);

    std::array<std::size_t, kNumDims> pick{};
    while (true) {
      Mapping m = trivial_mapping(L);
      m.spatial = sp;
      for (LoopDim d : kAllDims)
        for (int j = 0; j < L; ++j) m.levels[j].factors[idx(d)] = options[idx(d)][pick[idx(d)]][j];
      normalize_orders(m);

      if (validate(m, layer, spec).empty()) {
        for (LevelTiling& lt : m.levels) std::sort(lt.order.begin(), lt.order.end());
        // Odometer over every level's permutations.
        while (true) {
          ++evaluated;
          CostReport rep = cost_unchecked(layer, spec, m);
          if (!best || better_candidate(rep.total_energy, m, best->report.total_energy, best->mapping))
            best = MapperResult{m, std::move(rep), 0, {}};
          int j = 0;
          for (; j < L; ++j) {
            auto& o = m.levels[j].order;
            if (std::next_permutation(o.begin(), o.end())) break;
          }
          if (j == L) break;
        }
      }

      int d = 0;
      for (; d < kNumDims; ++d) {
        if (++pick[d] < options[d].size()) break;
        pick[d] = 0;
      }
      if (d == kNumDims) break;
    }
  }
  if (!best) throw ModelError("exhaustive search found no valid mapping for layer '" + layer.name + "'");
  best->candidates_evaluated = evaluated;
  best->elapsed = std::chrono::steady_clock::now() - start;
  return *best;
}

}  // namespace localmap

#include <algorithm>
#include <numeric>

#include "localmap/error.hpp"
#include "localmap/mappers.hpp"

namespace localmap {

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string_view dataflow_name(Dataflow df) {
  switch (df) {
    case Dataflow::RS: return "rs";
    case Dataflow::OS: return "os";
    case Dataflow::WS: return "ws";
  }
  return "?";
}

Dataflow parse_dataflow(std::string_view name) {
  if (name == "rs" || name == "RS") return Dataflow::RS;
  if (name == "os" || name == "OS") return Dataflow::OS;
  if (name == "ws" || name == "WS") return Dataflow::WS;
  throw ConfigError("unknown dataflow '" + std::string(name) + "' (expected rs, os or ws)");
}

namespace {

std::vector<std::pair<Count, int>> prime_powers(Count n) {
  std::vector<std::pair<Count, int>> out;
  for (Count p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    if (e) out.push_back({p, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

bool contains(const std::vector<LoopDim>& v, LoopDim d) {
  return std::find(v.begin(), v.end(), d) != v.end();
}

// Uniform ordered factorization of n into `parts` factors: each prime's
// exponent is spread over the parts by a uniform weak composition.
std::vector<Count> random_factorization(Count n, int parts, Rng& rng) {
  std::vector<Count> f(static_cast<std::size_t>(parts), 1);
  for (auto [p, e] : prime_powers(n)) {
    // Choose parts - 1 bar positions among e + parts - 1 slots.
    const int slots = e + parts - 1;
    std::vector<int> pos(static_cast<std::size_t>(slots));
    std::iota(pos.begin(), pos.end(), 0);
    rng.shuffle(pos);
    std::vector<int> bars(pos.begin(), pos.begin() + (parts - 1));
    std::sort(bars.begin(), bars.end());
    int prev = -1;
    for (int k = 0; k < parts; ++k) {
      const int next = k < parts - 1 ? bars[k] : slots;
      const int stars = next - prev - 1;
      for (int s = 0; s < stars; ++s) f[k] *= p;
      prev = next;
    }
  }
  return f;
}

}  // namespace

std::vector<std::vector<Count>> ordered_factorizations(Count n, int parts) {
  std::vector<std::vector<Count>> out;
  std::vector<Count> cur;
  auto rec = [&](auto&& self, Count rest, int k) -> void {
    if (k == parts - 1) {
      cur.push_back(rest);
      out.push_back(cur);
      cur.pop_back();
      return;
    }
    for (Count d = 1; d <= rest; ++d) {
      if (rest % d) continue;
      cur.push_back(d);
      self(self, rest / d, k + 1);
      cur.pop_back();
    }
  };
  rec(rec, n, 0);
  return out;
}

Mapping sample_candidate(const ConvLayer& layer, const AcceleratorSpec& spec,
                         Rng& rng, const SampleConstraints& cons) {
  const int L = spec.num_levels();
  Mapping m = trivial_mapping(L);

  std::vector<LoopDim> x_choices, y_choices;
  for (LoopDim d : kAllDims)
    if (!contains(cons.l0_only, d) && d != cons.y_dim) x_choices.push_back(d);
  if (cons.y_dim) {
    m.spatial.y_dim = *cons.y_dim;
    m.spatial.x_dim = x_choices[rng.below(x_choices.size())];
  } else {
    m.spatial.x_dim = x_choices[rng.below(x_choices.size())];
    for (LoopDim d : x_choices)
      if (d != m.spatial.x_dim) y_choices.push_back(d);
    m.spatial.y_dim = y_choices[rng.below(y_choices.size())];
  }
  m.spatial.x_factor = 1 + rng.below(std::min(layer.bound(m.spatial.x_dim), spec.pe.n));
  m.spatial.y_factor = 1 + rng.below(std::min(layer.bound(m.spatial.y_dim), spec.pe.m));
  m.spatial = canonical_spatial(m.spatial);

  for (LoopDim d : kAllDims) {
    const Count residue = ceil_div(layer.bound(d), m.spatial.factor(d));
    int parts = L;
    if (contains(cons.l0_only, d)) parts = 1;
    else if (contains(cons.upto_l1, d)) parts = std::min(L, 2);
    const auto f = random_factorization(residue, parts, rng);
    for (int j = 0; j < parts; ++j) m.levels[j].factors[idx(d)] = f[j];
  }

  for (LevelTiling& lt : m.levels) {
    lt.order.clear();
    for (LoopDim d : kAllDims)
      if (lt.factor(d) > 1) lt.order.push_back(d);
    rng.shuffle(lt.order);
  }
  return m;
}

Mapping random_map(const ConvLayer& layer, const AcceleratorSpec& spec,
                   std::uint64_t seed) {
  Rng rng(seed);
  for (Count attempt = 0; attempt < kRandomMapAttempts; ++attempt) {
    Mapping m = sample_candidate(layer, spec, rng);
    if (validate(m, layer, spec).empty()) return m;
  }
  throw ModelError("no valid random mapping found for layer '" + layer.name +
                   "' after " + std::to_string(kRandomMapAttempts) + " attempts");
}

RandomExperimentSummary random_experiment(const ConvLayer& layer,
                                          const AcceleratorSpec& spec,
                                          Count count, std::uint64_t seed) {
  if (count < 3) throw ModelError("random experiment needs count >= 3");
  struct Sample {
    double energy;
    Mapping mapping;
  };
  std::vector<Sample> samples;
  samples.reserve(count);
  for (Count i = 0; i < count; ++i) {
    Mapping m = random_map(layer, spec, derive_seed(seed, i));
    const double e = cost_unchecked(layer, spec, m).total_energy;
    samples.push_back({e, std::move(m)});
  }
  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    return better_candidate(a.energy, a.mapping, b.energy, b.mapping);
  });

  RandomExperimentSummary s;
  s.count = count;
  const Sample& lo = samples.front();
  const Sample& med = samples[(count - 1) / 2];
  const Sample& hi = samples.back();
  s.e_min = lo.energy;
  s.e_med = med.energy;
  s.e_max = hi.energy;
  s.spread_med_max = s.e_max > 0 ? 1.0 - s.e_med / s.e_max : 0.0;
  s.spread_min_med = s.e_med > 0 ? 1.0 - s.e_min / s.e_med : 0.0;
  s.min_mapping = lo.mapping;
  s.med_mapping = med.mapping;
  s.max_mapping = hi.mapping;
  return s;
}

}  // namespace localmap

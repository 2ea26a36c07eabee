#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "localmap/architecture.hpp"
#include "localmap/costmodel.hpp"
#include "localmap/mapping.hpp"
#include "localmap/workload.hpp"

namespace localmap {

struct MapperResult {
  Mapping mapping;
  CostReport report;
  Count candidates_evaluated = 0;
  std::chrono::nanoseconds elapsed{0};
};

// Portable seeded generator: the bounded draw is defined here rather than by
// the standard library's distributions, so sequences match across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, n). n must be >= 1.
  std::uint64_t below(std::uint64_t n);
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// Seed of the i-th draw of a seeded experiment (splitmix64 of seed and i).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i);

// --- LOCAL -----------------------------------------------------------------

// Fixed dimension order used for factor growth and tie breaking.
inline constexpr std::array<LoopDim, kNumDims> kLocalDimOrder = {
    LoopDim::C, LoopDim::M, LoopDim::Q, LoopDim::P,
    LoopDim::S, LoopDim::R, LoopDim::N};

// The three LOCAL phases, exposed separately for testing.
SpatialAssignment local_parallelize(const ConvLayer& layer,
                                    const AcceleratorSpec& spec);
// Fills temporal factors level by level, innermost first. Throws ModelError
// ("architecture too small") when even a unit tile does not fit.
void local_assign(const ConvLayer& layer, const AcceleratorSpec& spec,
                  Mapping& mapping);
void local_schedule(Mapping& mapping);

// One-pass mapper; costs exactly one candidate.
MapperResult local_map(const ConvLayer& layer, const AcceleratorSpec& spec);

// --- random sampling ---------------------------------------------------------

enum class Dataflow { RS, OS, WS };
std::string_view dataflow_name(Dataflow df);
Dataflow parse_dataflow(std::string_view name);

// Restrictions applied while sampling. Dims in `l0_only` get all of their
// temporal factors at level 0 and are never spatial; dims in `upto_l1` keep
// their temporal factors in levels 0 and 1.
struct SampleConstraints {
  std::optional<LoopDim> y_dim;
  std::vector<LoopDim> l0_only;
  std::vector<LoopDim> upto_l1;
};

// One structurally valid candidate (coverage holds by construction; capacity
// is not checked). Per dim, the residue left by the spatial factor is split
// into an ordered factorization across levels drawn uniformly; each level's
// loop order is a uniform permutation.
Mapping sample_candidate(const ConvLayer& layer, const AcceleratorSpec& spec,
                         Rng& rng, const SampleConstraints& constraints = {});

inline constexpr Count kRandomMapAttempts = 200'000;

// Rejection-samples until a candidate passes validate(). Deterministic in
// the seed. Throws ModelError("no valid random mapping found").
Mapping random_map(const ConvLayer& layer, const AcceleratorSpec& spec,
                   std::uint64_t seed);

struct RandomExperimentSummary {
  Count count = 0;
  double e_min = 0, e_med = 0, e_max = 0;
  double spread_med_max = 0;  // 1 - e_med / e_max
  double spread_min_med = 0;  // 1 - e_min / e_med
  Mapping min_mapping, med_mapping, max_mapping;
};

// `count` >= 3 seeded random mappings; the median is the lower median.
RandomExperimentSummary random_experiment(const ConvLayer& layer,
                                          const AcceleratorSpec& spec,
                                          Count count, std::uint64_t seed);

// --- dataflow-constrained search -----------------------------------------------

inline constexpr Count kDefaultDataflowBudget = 500;

// Whether the mapping belongs to the dataflow family.
//  WS: R and S only at L0 (not spatial); at level 1 the weight-invariant
//      loops (N, P, Q) are all inside the weight loops (M, C).
//  OS: C, R and S have no temporal factor above level 1, and within levels 0
//      and 1 the reduction loops are all inside the output loops.
//  RS: spatial y is S; R only at L0 (not spatial).
bool satisfies_dataflow(Dataflow df, const Mapping& mapping);

// Samples up to `budget` distinct valid mappings of the dataflow family and
// keeps the lowest-energy one. Throws ModelError when none is found.
MapperResult dataflow_search(const ConvLayer& layer,
                             const AcceleratorSpec& spec, Dataflow df,
                             Count budget, std::uint64_t seed);

// --- exhaustive ---------------------------------------------------------------

inline constexpr Count kDefaultExhaustiveCap = 2'000'000;

// Number of candidates exhaustive_search would enumerate before capacity
// filtering: spatial pairs x per-dim ordered factorizations x loop orders.
BigCount exhaustive_space_size(const ConvLayer& layer,
                               const AcceleratorSpec& spec);

// Enumerates every candidate and returns the global minimum. Refuses with a
// ModelError quoting the space size when it exceeds `cap`.
MapperResult exhaustive_search(const ConvLayer& layer,
                               const AcceleratorSpec& spec,
                               Count cap = kDefaultExhaustiveCap);

// Strict ordering used by every search: energy, then mapping text.
bool better_candidate(double energy_a, const Mapping& a, double energy_b,
                      const Mapping& b);

// Ordered factorizations of n into `parts` factors, innermost first.
std::vector<std::vector<Count>> ordered_factorizations(Count n, int parts);


}  // namespace localmap

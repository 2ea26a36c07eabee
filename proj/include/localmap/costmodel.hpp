#pragma once

#include <array>
#include <string>
#include <vector>

#include "localmap/architecture.hpp"
#include "localmap/mapping.hpp"
#include "localmap/workload.hpp"

namespace localmap {

struct ReadWrite {
  Count reads = 0;
  Count writes = 0;
  bool operator==(const ReadWrite&) const = default;
};

// Word accesses to each storage level, per tensor. Reads at level i are words
// leaving level i (towards level i - 1, or the MACs at level 0); writes are
// words entering it (fills from above, partial-sum drains from below).
struct AccessCounts {
  std::vector<std::array<ReadWrite, kNumTensors>> levels;

  explicit AccessCounts(int num_levels = 0)
      : levels(static_cast<std::size_t>(num_levels)) {}
  ReadWrite& at(int level, TensorId t) { return levels[level][idx(t)]; }
  const ReadWrite& at(int level, TensorId t) const { return levels[level][idx(t)]; }
  Count level_total(int level) const;
  bool operator==(const AccessCounts&) const = default;
};

struct CostReport {
  AccessCounts accesses;
  std::vector<double> energy_by_level;
  double mac_energy_total = 0.0;
  double total_energy = 0.0;
  Count cycles = 0;
  Count compute_cycles = 0;
  double utilization = 0.0;
};

// Closed-form access counts. Tiles are fetched in full whenever a loop they
// depend on advances above their level; loops a tensor does not depend on
// only cause refetches when they sit outside the innermost dependent loop.
// Sibling tiles under one parent instance are served by a single multicast
// read (and reduced on the way back for outputs). Outputs are written back
// on every eviction and re-read whenever a partial sum already exists above.
AccessCounts analytic_accesses(const ConvLayer& layer,
                               const AcceleratorSpec& spec,
                               const Mapping& mapping);

inline constexpr Count kOracleIterationLimit = 10'000'000;

// Reference interpreter: walks every loop iteration and tracks the tile held
// by each buffer instance. Throws ModelError("too large for oracle") when the
// iteration space exceeds kOracleIterationLimit.
AccessCounts interpret(const ConvLayer& layer, const AcceleratorSpec& spec,
                       const Mapping& mapping);

// Energy, cycles and utilization from given access counts.
CostReport cost_from_accesses(const ConvLayer& layer,
                              const AcceleratorSpec& spec,
                              const Mapping& mapping, AccessCounts accesses);

// Validates, then costs with analytic_accesses. Throws ModelError listing the
// violations when the mapping is invalid.
CostReport cost(const ConvLayer& layer, const AcceleratorSpec& spec,
                const Mapping& mapping);

// Same as cost() without validation, for search loops that validated already.
CostReport cost_unchecked(const ConvLayer& layer, const AcceleratorSpec& spec,
                          const Mapping& mapping);

}  // namespace localmap

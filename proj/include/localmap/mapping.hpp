#pragma once

#include <array>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "localmap/architecture.hpp"
#include "localmap/workload.hpp"

namespace localmap {

using BigCount = boost::multiprecision::cpp_int;
using DimCounts = std::array<Count, kNumDims>;

inline DimCounts unit_dims() { return {1, 1, 1, 1, 1, 1, 1}; }

// One loop dimension per PE axis; x runs along the columns (n), y along the
// rows (m).
struct SpatialAssignment {
  LoopDim x_dim = LoopDim::Q;
  Count x_factor = 1;
  LoopDim y_dim = LoopDim::S;
  Count y_factor = 1;

  Count factor(LoopDim d) const {
    Count f = 1;
    if (x_dim == d) f *= x_factor;
    if (y_dim == d) f *= y_factor;
    return f;
  }
  bool operator==(const SpatialAssignment&) const = default;
};

// Temporal tiling at one memory level. `order` lists the dims whose factor
// exceeds one, innermost loop first.
struct LevelTiling {
  DimCounts factors = unit_dims();
  std::vector<LoopDim> order;

  Count factor(LoopDim d) const { return factors[idx(d)]; }
  bool operator==(const LevelTiling&) const = default;
};

struct Mapping {
  SpatialAssignment spatial;
  std::vector<LevelTiling> levels;  // innermost (L0) first, DRAM last

  bool operator==(const Mapping&) const = default;
};

// Renames an axis whose factor is 1 (it parallelizes nothing) to a fixed
// dim: Q for x and S for y, or the first dim the other axis does not use.
SpatialAssignment canonical_spatial(SpatialAssignment sp);

// A mapping with `num_levels` all-ones levels.
Mapping trivial_mapping(int num_levels);

// Spatial factor of `d` that fans out at boundary `b` (between level b and
// level b + 1) for the given architecture.
Count spatial_factor_at(const Mapping& mapping, const AcceleratorSpec& spec,
                        int boundary, LoopDim d);

// Unclamped extent of dim `d` covered by one tile at `level`: temporal factors
// at levels <= level times spatial factors at boundaries < level. With
// `include_own_boundary`, the spatial fan-out at boundary `level` is folded in
// too, giving the union of all sibling tiles under one parent instance.
Count tile_extent(const Mapping& mapping, const AcceleratorSpec& spec,
                  LoopDim d, int level, bool include_own_boundary = false);

// Clamped per-dim extent visible to one instance of `level_index`.
DimCounts tile_bounds(const Mapping& mapping, const ConvLayer& layer,
                      const AcceleratorSpec& spec, int level_index);

Count tile_footprint(const DimCounts& tile, TensorId t);
Count total_footprint(const DimCounts& tile);

// Every coverage, capacity, spatial and permutation violation.
std::vector<std::string> validate(const Mapping& mapping,
                                  const ConvLayer& layer,
                                  const AcceleratorSpec& spec);

// Active PEs over total PEs.
double utilization(const Mapping& mapping, const AcceleratorSpec& spec);

// Sets each level's order to exactly the dims with factor > 1, keeping the
// relative order of dims already listed and appending the rest in N..S order.
void normalize_orders(Mapping& mapping);

// Number of layer bounds greater than one.
int nontrivial_loops(const ConvLayer& layer);

// (n_loops!)^n_levels loop orderings.
BigCount mapspace_size(Count n_loops, Count n_levels);
// M^2 * P^2 * R^2 hardware configurations.
BigCount hardware_config_count(const ConvLayer& layer);
BigCount designspace_size(const ConvLayer& layer, Count n_loops,
                          Count n_levels);

// Text form:
//   spatial_x Q=14
//   spatial_y S=3
//   level 0: C=2 M=2
//   level 1:
//   ...
// Dims are listed innermost first; unit factors are omitted.
std::string to_text(const Mapping& mapping);
// Throws ConfigError on malformed text.
Mapping parse_mapping(const std::string& text);

}  // namespace localmap

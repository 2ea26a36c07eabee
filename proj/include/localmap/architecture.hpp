#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "localmap/workload.hpp"

namespace localmap {

enum class ArchStyle { NvdlaLike, EyerissLike };
std::string_view style_name(ArchStyle s);

struct MemoryLevel {
  std::string name;
  Count bank_count = 1;
  Count depth = 0;  // words per bank, in units of `width` bits
  Count width = 0;  // bits
  double energy_per_access = 0.0;
  bool unbounded = false;
};

struct PEArray {
  Count m = 1;  // rows (spatial y)
  Count n = 1;  // columns (spatial x)
  Count total() const { return m * n; }
};

struct PeCoord {
  Count row = 0;
  Count col = 0;
  auto operator<=>(const PeCoord&) const = default;
};

// Levels are ordered innermost first: index 0 is the per-PE scratchpad and
// the last level is DRAM.
struct AcceleratorSpec {
  std::string name;
  ArchStyle style = ArchStyle::NvdlaLike;
  Count word_bits = 16;
  std::vector<MemoryLevel> levels;
  PEArray pe;
  double mac_energy = 1.0;
  // Dataflow the architecture is conventionally compared against ("rs",
  // "os", "ws"); empty when unspecified.
  std::string baseline_dataflow;

  int num_levels() const { return static_cast<int>(levels.size()); }
  int dram_index() const { return num_levels() - 1; }
  int num_onchip_levels() const { return num_levels() - 1; }
};

// Words held by one bank, or nullopt for the unbounded (DRAM) level.
std::optional<Count> capacity_words(const MemoryLevel& level, Count word_bits);

// PEs served by bank `bank_index` of level `level_index`. At level 0 the bank
// index is the flattened PE index row * n + col. Throws ModelError on
// out-of-range indices.
std::vector<PeCoord> fed_pes(const AcceleratorSpec& spec, int level_index,
                             Count bank_index);

// Number of banks (or per-PE copies at level 0) physically present.
Count physical_instances(const AcceleratorSpec& spec, int level_index);

// Every invariant violation, empty when the spec is well formed.
std::vector<std::string> validate_spec(const AcceleratorSpec& spec);

// Boundary b sits between level b and level b + 1. Spatial fan-out along the
// PE columns (x) and rows (y) happens at a style-dependent boundary: both at
// boundary 0 for NVDLA-like arrays; for Eyeriss-like arrays columns fan out
// from the global buffer into the column banks (boundary 1) and rows fan out
// from each bank into its column of PEs (boundary 0).
int spatial_x_boundary(const AcceleratorSpec& spec);
int spatial_y_boundary(const AcceleratorSpec& spec);

}  // namespace localmap

#pragma once

#include <string>
#include <vector>

#include "localmap/architecture.hpp"
#include "localmap/workload.hpp"

namespace localmap {

// Directory holding the bundled architecture specs and workload catalog.
std::string data_dir();

// YAML architecture spec:
//   name: eyeriss
//   style: eyeriss            # or nvdla
//   word_bits: 16
//   mac_energy: 1
//   dataflow: rs              # optional baseline dataflow
//   pe: {m: 12, n: 14}
//   levels:                   # innermost first
//     - {name: L0, depth: 16, width: 16, banks: 1, energy_per_access: 1}
//     - {name: DRAM, width: 64, energy_per_access: 200, unbounded: true}
// Throws ConfigError on malformed input or when validate_spec() fails.
AcceleratorSpec parse_arch(const std::string& yaml_text);
AcceleratorSpec load_arch_file(const std::string& path);
// A path, or the name of a bundled spec (eyeriss, nvdla, shidiannao).
AcceleratorSpec load_arch(const std::string& path_or_name);
std::vector<std::string> bundled_arch_names();

// One layer per YAML document: {name, N, M, C, P, Q, R, S}.
std::vector<ConvLayer> parse_workloads(const std::string& yaml_text);
std::vector<ConvLayer> load_workload_file(const std::string& path);
// The nine-layer bundled catalog.
std::vector<ConvLayer> load_catalog();
// A path (every layer in the file), or a layer name from the catalog.
std::vector<ConvLayer> load_workloads(const std::string& path_or_name);

}  // namespace localmap

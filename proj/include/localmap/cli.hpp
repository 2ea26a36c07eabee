#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace localmap {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitModel = 3;

struct RunConfig {
  std::string command;  // map | experiment | validate | cost
  std::string mode;     // map: local|random|dataflow|exhaustive; experiment: random|compare
  std::string arch_path;
  std::string workload_path;
  std::string mapping_path;
  std::uint64_t seed = 0;
  std::uint64_t count = 3000;
  std::uint64_t budget = 500;
  std::uint64_t cap = 2'000'000;
  std::string dataflow;
  std::string output_path;
  std::string output_format = "csv";
  bool timing = false;
};

// Runs the command line `args` (without the program name). Reports go to
// `out` unless --out is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace localmap

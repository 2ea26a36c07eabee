#pragma once

#include <string>

#include <json.hpp>

#include "localmap/architecture.hpp"
#include "localmap/costmodel.hpp"
#include "localmap/mappers.hpp"
#include "localmap/workload.hpp"

namespace localmap {

// Shortest round-trip decimal form; stable across runs.
std::string format_number(double v);

// CSV columns: row,level,tensor,reads,writes,energy,cycles,utilization.
// One "access" row per (level, tensor), one "mac" row, one "summary" row.
std::string cost_report_csv(const AcceleratorSpec& spec, const CostReport& report);
nlohmann::ordered_json cost_report_json(const AcceleratorSpec& spec, const CostReport& report);

// `# key: value` header lines (mapper, arch, workload, candidates, mapping)
// followed by the cost report CSV. Wall time is only included on request.
std::string mapper_result_csv(const std::string& mapper, const AcceleratorSpec& spec,
                              const ConvLayer& layer, const MapperResult& result,
                              bool with_timing);
nlohmann::ordered_json mapper_result_json(const std::string& mapper,
                                          const AcceleratorSpec& spec,
                                          const ConvLayer& layer,
                                          const MapperResult& result, bool with_timing);

// arch,workload,count,seed,e_min,e_med,e_max,spread_med_max,spread_min_med
std::string random_summary_csv_header();
std::string random_summary_csv_row(const AcceleratorSpec& spec, const ConvLayer& layer,
                                   std::uint64_t seed, const RandomExperimentSummary& s);

}  // namespace localmap

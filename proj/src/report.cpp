#include "localmap/report.hpp"

#include <charconv>
#include <sstream>

namespace localmap {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string cost_report_csv(const AcceleratorSpec& spec, const CostReport& r) {
  std::ostringstream os;
  os << "row,level,tensor,reads,writes,energy,cycles,utilization\n";
  for (int i = 0; i < spec.num_levels(); ++i) {
    for (TensorId t : kAllTensors) {
      const ReadWrite& rw = r.accesses.at(i, t);
      const double e = static_cast<double>(rw.reads + rw.writes) * spec.levels[i].energy_per_access;
      os << "access," << spec.levels[i].name << ',' << tensor_name(t) << ',' << rw.reads << ','
         << rw.writes << ',' << format_number(e) << ",,\n";
    }
  }
  os << "mac,MAC,,,," << format_number(r.mac_energy_total) << ",,\n";
  os << "summary,,,,," << format_number(r.total_energy) << ',' << r.cycles << ','
     << format_number(r.utilization) << '\n';
  return os.str();
}

nlohmann::ordered_json cost_report_json(const AcceleratorSpec& spec, const CostReport& r) {
  nlohmann::ordered_json levels = nlohmann::ordered_json::array();
  for (int i = 0; i < spec.num_levels(); ++i) {
    nlohmann::ordered_json tensors = nlohmann::ordered_json::object();
    for (TensorId t : kAllTensors) {
      const ReadWrite& rw = r.accesses.at(i, t);
      tensors[std::string(tensor_name(t))] = {{"reads", rw.reads}, {"writes", rw.writes}};
    }
    levels.push_back({{"level", spec.levels[i].name},
                      {"accesses", tensors},
                      {"energy", r.energy_by_level[i]}});
  }
  return {{"levels", levels},
          {"mac_energy", r.mac_energy_total},
          {"total_energy", r.total_energy},
          {"cycles", r.cycles},
          {"compute_cycles", r.compute_cycles},
          {"utilization", r.utilization}};
}

namespace {

std::string one_line(const Mapping& m) {
  std::string text = to_text(m), out;
  for (char c : text) out += c == '\n' ? std::string("; ") : std::string(1, c);
  while (!out.empty() && (out.back() == ' ' || out.back() == ';')) out.pop_back();
  return out;
}

}  // namespace

std::string mapper_result_csv(const std::string& mapper, const AcceleratorSpec& spec,
                              const ConvLayer& layer, const MapperResult& res,
                              bool with_timing) {
  std::ostringstream os;
  os << "# mapper: " << mapper << '\n'
     << "# arch: " << spec.name << '\n'
     << "# workload: " << layer.name << '\n'
     << "# candidates_evaluated: " << res.candidates_evaluated << '\n'
     << "# mapping: " << one_line(res.mapping) << '\n';
  if (with_timing) os << "# wall_time_us: " << res.elapsed.count() / 1000 << '\n';
  os << cost_report_csv(spec, res.report);
  return os.str();
}

nlohmann::ordered_json mapper_result_json(const std::string& mapper,
                                          const AcceleratorSpec& spec,
                                          const ConvLayer& layer,
                                          const MapperResult& res, bool with_timing) {
  nlohmann::ordered_json j = {{"mapper", mapper},
                              {"arch", spec.name},
                              {"workload", layer.name},
                              {"candidates_evaluated", res.candidates_evaluated},
                              {"mapping", to_text(res.mapping)},
                              {"report", cost_report_json(spec, res.report)}};
  if (with_timing) j["wall_time_us"] = res.elapsed.count() / 1000;
  return j;
}

std::string random_summary_csv_header() {
  return "arch,workload,count,seed,e_min,e_med,e_max,spread_med_max,spread_min_med\n";
}

std::string random_summary_csv_row(const AcceleratorSpec& spec, const ConvLayer& layer,
                                   std::uint64_t seed, const RandomExperimentSummary& s) {
  std::ostringstream os;
  os << spec.name << ',' << layer.name << ',' << s.count << ',' << seed << ','
     << format_number(s.e_min) << ',' << format_number(s.e_med) << ','
     << format_number(s.e_max) << ',' << format_number(s.spread_med_max) << ','
     << format_number(s.spread_min_med) << '\n';
  return os.str();
}

}  // namespace localmap

#include "localmap/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "localmap/config_io.hpp"
#include "localmap/error.hpp"
#include "localmap/mappers.hpp"
#include "localmap/report.hpp"

namespace localmap {

namespace {

using json = nlohmann::ordered_json;

ConvLayer single_layer(const std::string& path_or_name) {
  auto layers = load_workloads(path_or_name);
  if (layers.size() != 1)
    throw ConfigError("workload '" + path_or_name + "' holds " + std::to_string(layers.size()) +
                      " layers; name a single layer");
  return layers.front();
}

Mapping load_mapping(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mapping '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_mapping(ss.str());
}

std::string run_map(const RunConfig& cfg) {
  const AcceleratorSpec spec = load_arch(cfg.arch_path);
  const ConvLayer layer = single_layer(cfg.workload_path);
  MapperResult res;
  std::string mapper = cfg.mode;
  if (cfg.mode == "local") {
    res = local_map(layer, spec);
  } else if (cfg.mode == "random") {
    const auto start = std::chrono::steady_clock::now();
    res.mapping = random_map(layer, spec, cfg.seed);
    res.report = cost(layer, spec, res.mapping);
    res.candidates_evaluated = 1;
    res.elapsed = std::chrono::steady_clock::now() - start;
  } else if (cfg.mode == "dataflow") {
    const std::string df_name = cfg.dataflow.empty() ? spec.baseline_dataflow : cfg.dataflow;
    if (df_name.empty()) throw ConfigError("--dataflow is required for this architecture");
    const Dataflow df = parse_dataflow(df_name);
    res = dataflow_search(layer, spec, df, cfg.budget, cfg.seed);
    mapper = "dataflow:" + std::string(dataflow_name(df));
  } else {
    res = exhaustive_search(layer, spec, cfg.cap);
  }
  if (cfg.output_format == "json") return mapper_result_json(mapper, spec, layer, res, cfg.timing).dump(2) + "\n";
  return mapper_result_csv(mapper, spec, layer, res, cfg.timing);
}

std::string run_random_experiment(const RunConfig& cfg) {
  const AcceleratorSpec spec = load_arch(cfg.arch_path.empty() ? "eyeriss" : cfg.arch_path);
  const auto layers = load_workloads(cfg.workload_path.empty() ? "vgg02_l5" : cfg.workload_path);
  std::string csv = random_summary_csv_header();
  json rows = json::array();
  for (const ConvLayer& layer : layers) {
    const auto s = random_experiment(layer, spec, cfg.count, cfg.seed);
    csv += random_summary_csv_row(spec, layer, cfg.seed, s);
    rows.push_back({{"arch", spec.name}, {"workload", layer.name}, {"count", s.count},
                    {"seed", cfg.seed}, {"e_min", s.e_min}, {"e_med", s.e_med},
                    {"e_max", s.e_max}, {"spread_med_max", s.spread_med_max},
                    {"spread_min_med", s.spread_min_med},
                    {"min_mapping", to_text(s.min_mapping)},
                    {"med_mapping", to_text(s.med_mapping)},
                    {"max_mapping", to_text(s.max_mapping)}});
  }
  return cfg.output_format == "json" ? rows.dump(2) + "\n" : csv;
}

std::string run_compare(const RunConfig& cfg) {
  std::vector<AcceleratorSpec> specs;
  if (cfg.arch_path.empty()) {
    for (const auto& name : bundled_arch_names()) specs.push_back(load_arch(name));
  } else {
    specs.push_back(load_arch(cfg.arch_path));
  }
  const auto layers = cfg.workload_path.empty() ? load_catalog() : load_workloads(cfg.workload_path);

  std::ostringstream csv;
  csv << "arch,workload,category,mapper,candidates,utilization,level,energy";
  if (cfg.timing) csv << ",wall_time_us";
  csv << '\n';
  json rows = json::array();

  for (const AcceleratorSpec& spec : specs) {
    const std::string df_name = cfg.dataflow.empty() ? spec.baseline_dataflow : cfg.dataflow;
    if (df_name.empty()) throw ConfigError("architecture '" + spec.name + "' names no baseline dataflow; pass --dataflow");
    const Dataflow df = parse_dataflow(df_name);
    for (const ConvLayer& layer : layers) {
      const std::pair<std::string, MapperResult> results[] = {
          {"local", local_map(layer, spec)},
          {"dataflow:" + std::string(dataflow_name(df)),
           dataflow_search(layer, spec, df, cfg.budget, cfg.seed)}};
      for (const auto& [mapper, res] : results) {
        const std::string prefix = spec.name + ',' + layer.name + ',' +
                                   std::string(category_name(workload_category(layer))) + ',' + mapper +
                                   ',' + std::to_string(res.candidates_evaluated) + ',' +
                                   format_number(res.report.utilization) + ',';
        const std::string suffix = cfg.timing ? ',' + std::to_string(res.elapsed.count() / 1000) : "";
        for (int i = 0; i < spec.num_levels(); ++i)
          csv << prefix << spec.levels[i].name << ',' << format_number(res.report.energy_by_level[i]) << suffix << '\n';
        csv << prefix << "MAC," << format_number(res.report.mac_energy_total) << suffix << '\n';
        csv << prefix << "total," << format_number(res.report.total_energy) << suffix << '\n';

        json j = mapper_result_json(mapper, spec, layer, res, cfg.timing);
        j["category"] = std::string(category_name(workload_category(layer)));
        rows.push_back(std::move(j));
      }
    }
  }
  return cfg.output_format == "json" ? rows.dump(2) + "\n" : csv.str();
}

std::string run_cost(const RunConfig& cfg) {
  const AcceleratorSpec spec = load_arch(cfg.arch_path);
  const ConvLayer layer = single_layer(cfg.workload_path);
  const Mapping m = load_mapping(cfg.mapping_path);
  const CostReport rep = cost(layer, spec, m);
  if (cfg.output_format == "json") return cost_report_json(spec, rep).dump(2) + "\n";
  return cost_report_csv(spec, rep);
}

// Returns the exit code; violations are printed as the report.
int run_validate(const RunConfig& cfg, std::string& report) {
  const AcceleratorSpec spec = load_arch(cfg.arch_path);
  const ConvLayer layer = single_layer(cfg.workload_path);
  const Mapping m = load_mapping(cfg.mapping_path);
  const auto errs = validate(m, layer, spec);
  if (errs.empty()) {
    report = "ok\n";
    return kExitOk;
  }
  for (const auto& e : errs) report += e + "\n";
  return kExitModel;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--arch", cfg.arch_path, "Architecture spec file or bundled name");
  sub->add_option("--workload", cfg.workload_path, "Workload file or catalog layer name");
  sub->add_option("--seed", cfg.seed, "Random seed");
  sub->add_option("--out", cfg.output_path, "Write the report here instead of stdout");
  sub->add_option("--format", cfg.output_format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--timing", cfg.timing, "Include wall-clock times (breaks byte determinism)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Mapping toolkit for spatial DNN accelerators", "localmap"};
  app.require_subcommand(1);

  auto* map = app.add_subcommand("map", "Map one layer with the chosen mapper");
  map->add_option("mapper", cfg.mode, "local | random | dataflow | exhaustive")
      ->required()
      ->check(CLI::IsMember({"local", "random", "dataflow", "exhaustive"}));
  add_common(map, cfg);
  map->add_option("--budget", cfg.budget, "Candidates sampled by dataflow search")->check(CLI::PositiveNumber);
  map->add_option("--dataflow", cfg.dataflow, "rs | os | ws")->check(CLI::IsMember({"rs", "os", "ws"}));
  map->add_option("--cap", cfg.cap, "Largest map-space exhaustive search accepts")->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("experiment", "Run the random or comparison experiment");
  exp->add_option("kind", cfg.mode, "random | compare")
      ->required()
      ->check(CLI::IsMember({"random", "compare"}));
  add_common(exp, cfg);
  exp->add_option("--count", cfg.count, "Random mappings to draw")->check(CLI::Range(std::uint64_t{3}, std::uint64_t{100'000'000}));
  exp->add_option("--budget", cfg.budget, "Candidates sampled by dataflow search")->check(CLI::PositiveNumber);
  exp->add_option("--dataflow", cfg.dataflow, "Override the baseline dataflow")->check(CLI::IsMember({"rs", "os", "ws"}));

  auto* val = app.add_subcommand("validate", "Check a mapping file against a layer and architecture");
  add_common(val, cfg);
  val->add_option("--mapping", cfg.mapping_path, "Mapping text file")->required();

  auto* cst = app.add_subcommand("cost", "Cost a mapping file");
  add_common(cst, cfg);
  cst->add_option("--mapping", cfg.mapping_path, "Mapping text file")->required();

  for (auto* sub : {map, val, cst}) {
    sub->get_option("--arch")->required();
    sub->get_option("--workload")->required();
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  std::string report;
  int code = kExitOk;
  try {
    if (cfg.command == "map") report = run_map(cfg);
    else if (cfg.command == "experiment") report = cfg.mode == "random" ? run_random_experiment(cfg) : run_compare(cfg);
    else if (cfg.command == "cost") report = run_cost(cfg);
    else code = run_validate(cfg, report);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return kExitModel;
  }

  if (cfg.output_path.empty()) {
    out << report;
  } else {
    std::ofstream f(cfg.output_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << cfg.output_path << "'\n";
      return kExitConfig;
    }
    f << report;
  }
  return code;
}

}  // namespace localmap

#include "localmap/config_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "localmap/error.hpp"

namespace localmap {

namespace fs = std::filesystem;

std::string data_dir() {
  if (const char* env = std::getenv("LOCALMAP_DATA_DIR")) return env;
  return LOCALMAP_DATA_DIR;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
T get(const YAML::Node& node, const char* key, const std::string& where) {
  const YAML::Node v = node[key];
  if (!v) throw ConfigError(where + ": missing '" + key + "'");
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": bad value for '" + key + "'");
  }
}

template <class T>
T get_or(const YAML::Node& node, const char* key, T fallback, const std::string& where) {
  return node[key] ? get<T>(node, key, where) : fallback;
}

Count get_count(const YAML::Node& node, const char* key, const std::string& where) {
  const auto v = get<long long>(node, key, where);
  if (v < 0) throw ConfigError(where + ": '" + key + "' must be non-negative");
  return static_cast<Count>(v);
}

}  // namespace

AcceleratorSpec parse_arch(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("architecture YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("architecture spec must be a mapping");

  AcceleratorSpec spec;
  spec.name = get_or<std::string>(root, "name", "unnamed", "arch");
  const std::string style = get<std::string>(root, "style", "arch");
  if (style == "nvdla") spec.style = ArchStyle::NvdlaLike;
  else if (style == "eyeriss") spec.style = ArchStyle::EyerissLike;
  else throw ConfigError("arch: unknown style '" + style + "' (expected nvdla or eyeriss)");
  spec.word_bits = root["word_bits"] ? get_count(root, "word_bits", "arch") : 16;
  spec.mac_energy = get_or<double>(root, "mac_energy", 1.0, "arch");
  spec.baseline_dataflow = get_or<std::string>(root, "dataflow", "", "arch");

  const YAML::Node pe = root["pe"];
  if (!pe || !pe.IsMap()) throw ConfigError("arch: missing 'pe' mapping");
  spec.pe.m = get_count(pe, "m", "arch.pe");
  spec.pe.n = get_count(pe, "n", "arch.pe");

  const YAML::Node levels = root["levels"];
  if (!levels || !levels.IsSequence()) throw ConfigError("arch: missing 'levels' list");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const YAML::Node l = levels[i];
    const std::string where = "arch.levels[" + std::to_string(i) + "]";
    MemoryLevel ml;
    ml.name = get_or<std::string>(l, "name", "L" + std::to_string(i), where);
    ml.unbounded = get_or<bool>(l, "unbounded", false, where);
    ml.depth = ml.unbounded ? (l["depth"] ? get_count(l, "depth", where) : 0) : get_count(l, "depth", where);
    ml.width = get_count(l, "width", where);
    ml.bank_count = l["banks"] ? get_count(l, "banks", where) : 1;
    ml.energy_per_access = get<double>(l, "energy_per_access", where);
    spec.levels.push_back(std::move(ml));
  }

  const auto errs = validate_spec(spec);
  if (!errs.empty()) {
    std::string msg = "invalid architecture '" + spec.name + "':";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return spec;
}

AcceleratorSpec load_arch_file(const std::string& path) {
  return parse_arch(read_file(path));
}

std::vector<std::string> bundled_arch_names() {
  return {"eyeriss", "nvdla", "shidiannao"};
}

AcceleratorSpec load_arch(const std::string& path_or_name) {
  if (fs::exists(path_or_name) && fs::is_regular_file(path_or_name))
    return load_arch_file(path_or_name);
  const fs::path bundled = fs::path(data_dir()) / "arch" / (path_or_name + ".yaml");
  if (fs::exists(bundled)) return load_arch_file(bundled.string());
  throw ConfigError("architecture '" + path_or_name + "' is neither a file nor a bundled spec");
}

std::vector<ConvLayer> parse_workloads(const std::string& yaml_text) {
  std::vector<YAML::Node> docs;
  try {
    docs = YAML::LoadAll(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("workload YAML: ") + e.what());
  }
  std::vector<ConvLayer> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const YAML::Node& doc = docs[i];
    if (doc.IsNull()) continue;
    if (!doc.IsMap()) throw ConfigError("workload document " + std::to_string(i) + " must be a mapping");
    const std::string where = "workload[" + std::to_string(i) + "]";
    ConvLayer layer;
    layer.name = get<std::string>(doc, "name", where);
    for (LoopDim d : kAllDims) {
      const std::string key(dim_name(d));
      layer.bound(d) = get_count(doc, key.c_str(), where);
    }
    validate_layer(layer);
    out.push_back(std::move(layer));
  }
  if (out.empty()) throw ConfigError("workload file has no layers");
  return out;
}

std::vector<ConvLayer> load_workload_file(const std::string& path) {
  return parse_workloads(read_file(path));
}

std::vector<ConvLayer> load_catalog() {
  return load_workload_file((fs::path(data_dir()) / "workloads" / "catalog.yaml").string());
}

std::vector<ConvLayer> load_workloads(const std::string& path_or_name) {
  if (fs::exists(path_or_name) && fs::is_regular_file(path_or_name))
    return load_workload_file(path_or_name);
  const fs::path bundled = fs::path(data_dir()) / "workloads" / (path_or_name + ".yaml");
  if (fs::exists(bundled)) return load_workload_file(bundled.string());
  for (const ConvLayer& l : load_catalog())
    if (l.name == path_or_name) return {l};
  throw ConfigError("workload '" + path_or_name + "' is neither a file nor a catalog entry");
}

}  // namespace localmap

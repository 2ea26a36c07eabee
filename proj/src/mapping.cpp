#include "localmap/mapping.hpp"

#include <algorithm>
#include <sstream>

#include "localmap/error.hpp"

namespace localmap {

SpatialAssignment canonical_spatial(SpatialAssignment sp) {
  auto pick = [](LoopDim preferred, LoopDim taken) {
    if (preferred != taken) return preferred;
    return taken == LoopDim::N ? LoopDim::M : LoopDim::N;
  };
  if (sp.x_factor == 1 && sp.y_factor == 1) {
    sp.x_dim = LoopDim::Q;
    sp.y_dim = LoopDim::S;
  } else if (sp.x_factor == 1) {
    sp.x_dim = pick(LoopDim::Q, sp.y_dim);
  } else if (sp.y_factor == 1) {
    sp.y_dim = pick(LoopDim::S, sp.x_dim);
  }
  return sp;
}

Mapping trivial_mapping(int num_levels) {
  Mapping m;
  m.levels.resize(static_cast<std::size_t>(num_levels));
  return m;
}

Count spatial_factor_at(const Mapping& mapping, const AcceleratorSpec& spec,
                        int boundary, LoopDim d) {
  Count f = 1;
  const SpatialAssignment& sp = mapping.spatial;
  if (sp.x_dim == d && spatial_x_boundary(spec) == boundary) f *= sp.x_factor;
  if (sp.y_dim == d && spatial_y_boundary(spec) == boundary) f *= sp.y_factor;
  return f;
}

Count tile_extent(const Mapping& mapping, const AcceleratorSpec& spec,
                  LoopDim d, int level, bool include_own_boundary) {
  Count e = 1;
  for (int j = 0; j <= level; ++j) {
    e = checked_mul(e, mapping.levels[j].factor(d));
    if (j < level || include_own_boundary)
      e = checked_mul(e, spatial_factor_at(mapping, spec, j, d));
  }
  return e;
}

DimCounts tile_bounds(const Mapping& mapping, const ConvLayer& layer,
                      const AcceleratorSpec& spec, int level_index) {
  DimCounts out{};
  for (LoopDim d : kAllDims) {
    out[idx(d)] = std::min(layer.bound(d),
                           tile_extent(mapping, spec, d, level_index));
  }
  return out;
}

Count tile_footprint(const DimCounts& t, TensorId tensor) {
  auto at = [&](LoopDim d) { return t[idx(d)]; };
  using D = LoopDim;
  switch (tensor) {
    case TensorId::Weight:
      return at(D::M) * at(D::C) * at(D::R) * at(D::S);
    case TensorId::Input:
      return at(D::N) * at(D::C) * (at(D::P) + at(D::R) - 1) *
             (at(D::Q) + at(D::S) - 1);
    case TensorId::Output:
      return at(D::N) * at(D::M) * at(D::P) * at(D::Q);
  }
  return 0;
}

Count total_footprint(const DimCounts& tile) {
  Count sum = 0;
  for (TensorId t : kAllTensors) sum += tile_footprint(tile, t);
  return sum;
}

namespace {

// Factors of `d` from innermost to outermost: L0, spatial@0, L1, spatial@1...
std::vector<Count> factor_chain(const Mapping& mapping,
                                const AcceleratorSpec& spec, LoopDim d) {
  std::vector<Count> chain;
  for (std::size_t j = 0; j < mapping.levels.size(); ++j) {
    chain.push_back(mapping.levels[j].factor(d));
    if (j + 1 < mapping.levels.size())
      chain.push_back(spatial_factor_at(mapping, spec, static_cast<int>(j), d));
  }
  return chain;
}

void check_structure(const Mapping& mapping, std::vector<std::string>& errs) {
  for (std::size_t j = 0; j < mapping.levels.size(); ++j) {
    const LevelTiling& lt = mapping.levels[j];
    const std::string tag = "level " + std::to_string(j);
    std::array<int, kNumDims> seen{};
    for (LoopDim d : lt.order) ++seen[idx(d)];
    for (LoopDim d : kAllDims) {
      const Count f = lt.factor(d);
      if (f == 0) errs.push_back(tag + ": factor of " + std::string(dim_name(d)) + " is 0");
      const int want = f > 1 ? 1 : 0;
      if (seen[idx(d)] != want)
        errs.push_back(tag + ": permutation lists " + std::string(dim_name(d)) + " " +
                       std::to_string(seen[idx(d)]) + " times, expected " + std::to_string(want));
    }
  }
}

}  // namespace

std::vector<std::string> validate(const Mapping& mapping,
                                  const ConvLayer& layer,
                                  const AcceleratorSpec& spec) {
  std::vector<std::string> errs;
  if (mapping.levels.size() != spec.levels.size()) {
    errs.push_back("mapping has " + std::to_string(mapping.levels.size()) +
                   " levels, architecture has " +
                   std::to_string(spec.levels.size()));
    return errs;
  }
  check_structure(mapping, errs);

  const SpatialAssignment& sp = mapping.spatial;
  if (sp.x_dim == sp.y_dim) errs.push_back("spatial x and y use the same dimension");
  if (sp.x_factor == 0 || sp.y_factor == 0) errs.push_back("spatial factors must be >= 1");
  if (sp.x_factor > spec.pe.n)
    errs.push_back("spatial x factor " + std::to_string(sp.x_factor) + " exceeds PE columns " + std::to_string(spec.pe.n));
  if (sp.y_factor > spec.pe.m)
    errs.push_back("spatial y factor " + std::to_string(sp.y_factor) + " exceeds PE rows " + std::to_string(spec.pe.m));
  if (!errs.empty()) return errs;

  try {
    for (LoopDim d : kAllDims) {
      const auto chain = factor_chain(mapping, spec, d);
      Count product = 1;
      for (Count f : chain) product = checked_mul(product, f);
      const Count bound = layer.bound(d);
      if (product < bound) {
        errs.push_back("dim " + std::string(dim_name(d)) + ": factors cover " +
                       std::to_string(product) + " < bound " + std::to_string(bound));
        continue;
      }
      auto outer = std::find_if(chain.rbegin(), chain.rend(), [](Count f) { return f > 1; });
      if (outer != chain.rend() && product / *outer >= bound) {
        errs.push_back("dim " + std::string(dim_name(d)) + ": covering is not minimal (" +
                       std::to_string(product) + " for bound " + std::to_string(bound) + ")");
      }
    }

    for (int i = 0; i < spec.num_levels(); ++i) {
      const auto cap = capacity_words(spec.levels[i], spec.word_bits);
      if (!cap) continue;
      const Count need = total_footprint(tile_bounds(mapping, layer, spec, i));
      if (need > *cap) {
        errs.push_back("level " + std::to_string(i) + " (" + spec.levels[i].name +
                       "): footprint " + std::to_string(need) + " words exceeds capacity " +
                       std::to_string(*cap));
      }
    }
  } catch (const OverflowError& e) {
    errs.push_back(std::string("overflow while validating: ") + e.what());
  }
  return errs;
}

double utilization(const Mapping& mapping, const AcceleratorSpec& spec) {
  return static_cast<double>(mapping.spatial.x_factor * mapping.spatial.y_factor) /
         static_cast<double>(spec.pe.total());
}

void normalize_orders(Mapping& mapping) {
  for (LevelTiling& lt : mapping.levels) {
    std::vector<LoopDim> order;
    for (LoopDim d : lt.order)
      if (lt.factor(d) > 1 && std::find(order.begin(), order.end(), d) == order.end())
        order.push_back(d);
    for (LoopDim d : kAllDims)
      if (lt.factor(d) > 1 && std::find(order.begin(), order.end(), d) == order.end())
        order.push_back(d);
    lt.order = std::move(order);
  }
}

int nontrivial_loops(const ConvLayer& layer) {
  return static_cast<int>(std::count_if(layer.bounds.begin(), layer.bounds.end(),
                                        [](Count b) { return b > 1; }));
}

BigCount mapspace_size(Count n_loops, Count n_levels) {
  if (n_loops == 0 || n_levels == 0) throw ModelError("mapspace_size needs n_loops >= 1 and n_levels >= 1");
  BigCount fact = 1;
  for (Count i = 2; i <= n_loops; ++i) fact *= i;
  BigCount out = 1;
  for (Count i = 0; i < n_levels; ++i) out *= fact;
  return out;
}

BigCount hardware_config_count(const ConvLayer& layer) {
  BigCount m = layer.bound(LoopDim::M);
  BigCount p = layer.bound(LoopDim::P);
  BigCount r = layer.bound(LoopDim::R);
  return m * m * p * p * r * r;
}

BigCount designspace_size(const ConvLayer& layer, Count n_loops,
                          Count n_levels) {
  return hardware_config_count(layer) * mapspace_size(n_loops, n_levels);
}

std::string to_text(const Mapping& mapping) {
  std::ostringstream os;
  const auto& sp = mapping.spatial;
  os << "spatial_x " << dim_name(sp.x_dim) << '=' << sp.x_factor << '\n';
  os << "spatial_y " << dim_name(sp.y_dim) << '=' << sp.y_factor << '\n';
  for (std::size_t j = 0; j < mapping.levels.size(); ++j) {
    os << "level " << j << ':';
    for (LoopDim d : mapping.levels[j].order)
      os << ' ' << dim_name(d) << '=' << mapping.levels[j].factor(d);
    os << '\n';
  }
  return os.str();
}

namespace {

std::pair<LoopDim, Count> parse_assign(const std::string& tok) {
  const auto eq = tok.find('=');
  if (eq == std::string::npos) throw ConfigError("expected dim=factor, got '" + tok + "'");
  const LoopDim d = parse_dim(tok.substr(0, eq));
  Count f = 0;
  try {
    std::size_t used = 0;
    f = std::stoull(tok.substr(eq + 1), &used);
    if (used != tok.size() - eq - 1) throw std::invalid_argument(tok);
  } catch (const std::logic_error&) {
    throw ConfigError("bad factor in '" + tok + "'");
  }
  if (f == 0) throw ConfigError("factor must be >= 1 in '" + tok + "'");
  return {d, f};
}

}  // namespace

Mapping parse_mapping(const std::string& text) {
  Mapping m;
  bool have_x = false, have_y = false;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "spatial_x" || head == "spatial_y") {
      std::string tok;
      if (!(ls >> tok)) throw ConfigError("missing assignment after " + head);
      auto [d, f] = parse_assign(tok);
      if (head == "spatial_x") {
        m.spatial.x_dim = d, m.spatial.x_factor = f, have_x = true;
      } else {
        m.spatial.y_dim = d, m.spatial.y_factor = f, have_y = true;
      }
    } else if (head == "level") {
      std::string num;
      ls >> num;
      if (num.empty() || num.back() != ':') throw ConfigError("expected 'level <i>:' in '" + line + "'");
      num.pop_back();
      std::size_t index = 0;
      try {
        index = std::stoul(num);
      } catch (const std::logic_error&) {
        throw ConfigError("bad level index in '" + line + "'");
      }
      if (index != m.levels.size()) throw ConfigError("levels must be listed in order starting at 0");
      LevelTiling lt;
      std::string tok;
      while (ls >> tok) {
        auto [d, f] = parse_assign(tok);
        if (lt.factors[idx(d)] != 1 || f == 1)
          throw ConfigError("duplicate or unit factor for " + std::string(dim_name(d)) + " in '" + line + "'");
        lt.factors[idx(d)] = f;
        lt.order.push_back(d);
      }
      m.levels.push_back(std::move(lt));
    } else {
      throw ConfigError("unrecognized mapping line '" + line + "'");
    }
  }
  if (!have_x || !have_y) throw ConfigError("mapping needs spatial_x and spatial_y lines");
  if (m.levels.empty()) throw ConfigError("mapping has no levels");
  return m;
}

}  // namespace localmap

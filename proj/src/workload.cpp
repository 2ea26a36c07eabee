#include "localmap/workload.hpp"

#include <algorithm>
#include <limits>

#include "localmap/error.hpp"

namespace localmap {

namespace {
constexpr std::array<std::string_view, kNumDims> kDimNames = {
    "N", "M", "C", "P", "Q", "R", "S"};
constexpr std::array<std::string_view, kNumTensors> kTensorNames = {
    "Weight", "Input", "Output"};
}  // namespace

std::string_view dim_name(LoopDim d) { return kDimNames[idx(d)]; }
std::string_view tensor_name(TensorId t) { return kTensorNames[idx(t)]; }

LoopDim parse_dim(std::string_view name) {
  for (LoopDim d : kAllDims) {
    if (dim_name(d) == name) return d;
  }
  throw ConfigError("unknown loop dimension '" + std::string(name) + "'");
}

ConvLayer::ConvLayer(std::string name_, Count n, Count m, Count c, Count p,
                     Count q, Count r, Count s)
    : name(std::move(name_)), bounds{n, m, c, p, q, r, s} {}

void validate_layer(const ConvLayer& layer) {
  for (LoopDim d : kAllDims) {
    if (layer.bound(d) == 0) {
      throw ConfigError("layer '" + layer.name + "': bound " +
                        std::string(dim_name(d)) + " must be >= 1");
    }
  }
}

Count checked_mul(Count a, Count b) {
  Count out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw OverflowError("count overflow: " + std::to_string(a) + " * " +
                        std::to_string(b));
  }
  return out;
}

Count mac_count(const ConvLayer& layer) {
  Count total = 1;
  for (Count b : layer.bounds) total = checked_mul(total, b);
  return total;
}

Count tensor_size(const ConvLayer& layer, TensorId t) {
  using D = LoopDim;
  switch (t) {
    case TensorId::Weight:
      return checked_mul(checked_mul(layer.bound(D::M), layer.bound(D::C)),
                         checked_mul(layer.bound(D::R), layer.bound(D::S)));
    case TensorId::Input:
      return checked_mul(checked_mul(layer.bound(D::N), layer.bound(D::C)),
                         checked_mul(layer.H(), layer.W()));
    case TensorId::Output:
      return checked_mul(checked_mul(layer.bound(D::N), layer.bound(D::M)),
                         checked_mul(layer.bound(D::P), layer.bound(D::Q)));
  }
  return 0;
}

std::string_view category_name(WorkloadCategory c) {
  switch (c) {
    case WorkloadCategory::HighC:
      return "High C";
    case WorkloadCategory::HighM:
      return "High M";
    case WorkloadCategory::HighPQ:
      return "High P and Q";
  }
  return "?";
}

WorkloadCategory workload_category(const ConvLayer& layer) {
  const Count c = layer.bound(LoopDim::C);
  const Count m = layer.bound(LoopDim::M);
  const Count pq = std::max(layer.bound(LoopDim::P), layer.bound(LoopDim::Q));
  if (c >= m && c >= pq) return WorkloadCategory::HighC;
  if (m >= pq) return WorkloadCategory::HighM;
  return WorkloadCategory::HighPQ;
}

}  // namespace localmap

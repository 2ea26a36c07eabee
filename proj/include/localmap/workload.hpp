#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace localmap {

using Count = std::uint64_t;

// The seven independent convolution loop bounds.
enum class LoopDim : int { N = 0, M, C, P, Q, R, S };
inline constexpr int kNumDims = 7;
inline constexpr std::array<LoopDim, kNumDims> kAllDims = {
    LoopDim::N, LoopDim::M, LoopDim::C, LoopDim::P,
    LoopDim::Q, LoopDim::R, LoopDim::S};

enum class TensorId : int { Weight = 0, Input, Output };
inline constexpr int kNumTensors = 3;
inline constexpr std::array<TensorId, kNumTensors> kAllTensors = {
    TensorId::Weight, TensorId::Input, TensorId::Output};

std::string_view dim_name(LoopDim d);
std::string_view tensor_name(TensorId t);
// Throws ConfigError on an unknown name.
LoopDim parse_dim(std::string_view name);

inline constexpr int idx(LoopDim d) { return static_cast<int>(d); }
inline constexpr int idx(TensorId t) { return static_cast<int>(t); }

// Whether the tensor is indexed by the loop dimension. Input depends on P, Q,
// R and S through H = P + R - 1 and W = Q + S - 1.
constexpr bool is_relevant(TensorId t, LoopDim d) {
  switch (t) {
    case TensorId::Weight:
      return d == LoopDim::M || d == LoopDim::C || d == LoopDim::R ||
             d == LoopDim::S;
    case TensorId::Input:
      return d != LoopDim::M;
    case TensorId::Output:
      return d == LoopDim::N || d == LoopDim::M || d == LoopDim::P ||
             d == LoopDim::Q;
  }
  return false;
}

// A stride-1, unpadded convolution layer.
struct ConvLayer {
  std::string name;
  std::array<Count, kNumDims> bounds{1, 1, 1, 1, 1, 1, 1};

  ConvLayer() = default;
  ConvLayer(std::string name, Count n, Count m, Count c, Count p, Count q,
            Count r, Count s);

  Count bound(LoopDim d) const { return bounds[idx(d)]; }
  Count& bound(LoopDim d) { return bounds[idx(d)]; }
  Count H() const { return bound(LoopDim::P) + bound(LoopDim::R) - 1; }
  Count W() const { return bound(LoopDim::Q) + bound(LoopDim::S) - 1; }

  bool operator==(const ConvLayer&) const = default;
};

// Throws ConfigError when any bound is zero.
void validate_layer(const ConvLayer& layer);

inline Count ceil_div(Count a, Count b) { return (a + b - 1) / b; }

// Overflow-checked product. Throws OverflowError.
Count checked_mul(Count a, Count b);

Count mac_count(const ConvLayer& layer);
Count tensor_size(const ConvLayer& layer, TensorId t);

enum class WorkloadCategory { HighC, HighM, HighPQ };
std::string_view category_name(WorkloadCategory c);

// Dominant-shape category: the largest of C, M and max(P, Q); ties resolve
// in the order C, M, PQ.
WorkloadCategory workload_category(const ConvLayer& layer);

}  // namespace localmap

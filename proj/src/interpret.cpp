#include <map>
#include <set>

#include "localmap/costmodel.hpp"
#include "localmap/error.hpp"

namespace localmap {

namespace {

// One loop of the fully unrolled nest. Temporal loops belong to a memory
// level; spatial loops fan out at a boundary.
struct NestLoop {
  LoopDim dim;
  Count trip;
  bool spatial;
  int level;     // temporal: owning level
  int boundary;  // spatial: fan-out boundary
  Count stride = 1;
};

struct Range {
  Count lo = 0, hi = 0;  // [lo, hi), already clamped
  Count size() const { return hi > lo ? hi - lo : 0; }
};

struct BufferState {
  bool live = false;
  std::vector<Count> key;
  Count words = 0;                 // size of the tile currently held
  std::vector<char> touched;       // outputs only: elements with partial sums
};

class Interpreter {
 public:
  Interpreter(const ConvLayer& layer, const AcceleratorSpec& spec,
              const Mapping& mapping)
      : layer_(layer), L_(spec.num_levels()), acc_(L_) {
    // Outermost first: DRAM temporal loops, spatial fan-out below DRAM, the
    // next level's temporal loops, and so on down to L0.
    for (int j = L_ - 1; j >= 0; --j) {
      const auto& order = mapping.levels[j].order;
      for (auto it = order.rbegin(); it != order.rend(); ++it)
        nest_.push_back({*it, mapping.levels[j].factor(*it), false, j, -1});
      if (j > 0) {
        const int b = j - 1;
        const auto& sp = mapping.spatial;
        if (spatial_x_boundary(spec) == b && sp.x_factor > 1)
          nest_.push_back({sp.x_dim, sp.x_factor, true, -1, b});
        if (spatial_y_boundary(spec) == b && sp.y_factor > 1)
          nest_.push_back({sp.y_dim, sp.y_factor, true, -1, b});
      }
    }
    Count iterations = 1;
    for (const auto& l : nest_) {
      iterations = checked_mul(iterations, l.trip);
      if (iterations > kOracleIterationLimit) throw ModelError("too large for oracle");
    }
    if (mac_count(layer) > kOracleIterationLimit) throw ModelError("too large for oracle");

    // Strides: the product of the trips of every inner loop over the same dim.
    DimCounts running = unit_dims();
    for (auto it = nest_.rbegin(); it != nest_.rend(); ++it) {
      it->stride = running[idx(it->dim)];
      running[idx(it->dim)] *= it->trip;
    }
    index_.assign(nest_.size(), 0);
    states_.resize(static_cast<std::size_t>(L_ - 1));
  }

  AccessCounts run() {
    walk(0);
    // Final write-back of every output tile still held.
    for (int b = 0; b + 1 < L_; ++b)
      for (auto& [group, st] : states_[b][idx(TensorId::Output)])
        if (st.live) drain(b, st);
    return acc_;
  }

 private:
  void walk(std::size_t depth) {
    if (depth == nest_.size()) {
      visit();
      return;
    }
    for (Count i = 0; i < nest_[depth].trip; ++i) {
      index_[depth] = i;
      walk(depth + 1);
    }
  }

  // Loop belongs above boundary b: temporal at a level > b, or spatial at a
  // boundary > b.
  static bool above(const NestLoop& l, int b) {
    return l.spatial ? l.boundary > b : l.level > b;
  }

  void visit() {
    DimCounts point{};
    for (std::size_t k = 0; k < nest_.size(); ++k)
      point[idx(nest_[k].dim)] += index_[k] * nest_[k].stride;
    bool inside = true;
    for (LoopDim d : kAllDims) inside = inside && point[idx(d)] < layer_.bound(d);
    if (inside) {
      acc_.at(0, TensorId::Weight).reads += 1;
      acc_.at(0, TensorId::Input).reads += 1;
      acc_.at(0, TensorId::Output).reads += 1;
      acc_.at(0, TensorId::Output).writes += 1;
    }

    for (int b = 0; b + 1 < L_; ++b) {
      for (TensorId t : kAllTensors) {
        std::vector<Count> group, key;
        for (std::size_t k = 0; k < nest_.size(); ++k) {
          const NestLoop& l = nest_[k];
          if (!above(l, b)) continue;
          if (l.spatial) group.push_back(index_[k]);
          else if (is_relevant(t, l.dim)) key.push_back(index_[k]);
        }
        BufferState& st = states_[b][idx(t)][group];
        if (st.live && st.key == key) continue;
        if (st.live && t == TensorId::Output) drain(b, st);
        fetch(b, t, st, std::move(key));
      }
    }
  }

  // Union of all sibling tiles below boundary b at the current indices.
  std::array<Range, kNumDims> tile_ranges(int b) const {
    DimCounts base{}, extent = unit_dims();
    for (std::size_t k = 0; k < nest_.size(); ++k) {
      const NestLoop& l = nest_[k];
      if (above(l, b)) base[idx(l.dim)] += index_[k] * l.stride;
      else extent[idx(l.dim)] *= l.trip;
    }
    std::array<Range, kNumDims> r{};
    for (LoopDim d : kAllDims) {
      const Count lo = base[idx(d)];
      const Count hi = std::min(lo + extent[idx(d)], layer_.bound(d));
      r[idx(d)] = {lo, std::max(lo, hi)};
    }
    return r;
  }

  static Count distinct_sums(const Range& a, const Range& b) {
    std::set<Count> seen;
    for (Count x = a.lo; x < a.hi; ++x)
      for (Count y = b.lo; y < b.hi; ++y) seen.insert(x + y);
    return seen.size();
  }

  void fetch(int b, TensorId t, BufferState& st, std::vector<Count> key) {
    const auto r = tile_ranges(b);
    auto sz = [&](LoopDim d) { return r[idx(d)].size(); };
    using D = LoopDim;
    Count words = 0;
    switch (t) {
      case TensorId::Weight:
        words = sz(D::M) * sz(D::C) * sz(D::R) * sz(D::S);
        break;
      case TensorId::Input:
        words = sz(D::N) * sz(D::C) * distinct_sums(r[idx(D::P)], r[idx(D::R)]) *
                distinct_sums(r[idx(D::Q)], r[idx(D::S)]);
        break;
      case TensorId::Output:
        words = sz(D::N) * sz(D::M) * sz(D::P) * sz(D::Q);
        break;
    }

    Count transferred = words;
    if (t == TensorId::Output) {
      // Only elements that already hold a partial sum above need reading.
      if (st.touched.empty()) st.touched.assign(tensor_size(layer_, t), 0);
      transferred = 0;
      const Count M = layer_.bound(D::M), P = layer_.bound(D::P), Q = layer_.bound(D::Q);
      for (Count n = r[idx(D::N)].lo; n < r[idx(D::N)].hi; ++n)
        for (Count m = r[idx(D::M)].lo; m < r[idx(D::M)].hi; ++m)
          for (Count p = r[idx(D::P)].lo; p < r[idx(D::P)].hi; ++p)
            for (Count q = r[idx(D::Q)].lo; q < r[idx(D::Q)].hi; ++q) {
              char& flag = st.touched[((n * M + m) * P + p) * Q + q];
              transferred += flag ? 1 : 0;
              flag = 1;
            }
    }
    acc_.at(b + 1, t).reads += transferred;
    acc_.at(b, t).writes += transferred;
    st.live = true;
    st.key = std::move(key);
    st.words = words;
  }

  void drain(int b, BufferState& st) {
    acc_.at(b, TensorId::Output).reads += st.words;
    acc_.at(b + 1, TensorId::Output).writes += st.words;
  }

  const ConvLayer& layer_;
  int L_;
  AccessCounts acc_;
  std::vector<NestLoop> nest_;
  std::vector<Count> index_;
  // [boundary][tensor] -> parent instance (spatial indices above) -> state
  std::vector<std::array<std::map<std::vector<Count>, BufferState>, kNumTensors>> states_;
};

}  // namespace

AccessCounts interpret(const ConvLayer& layer, const AcceleratorSpec& spec,
                       const Mapping& mapping) {
  return Interpreter(layer, spec, mapping).run();
}

}  // namespace localmap

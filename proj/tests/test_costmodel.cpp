#include <doctest.h>

#include "localmap/costmodel.hpp"
#include "localmap/error.hpp"
#include "localmap/mappers.hpp"
#include "test_support.hpp"

using namespace localmap;
using namespace localmap::testing;

namespace {

Mapping with_factors(int levels, std::initializer_list<std::tuple<int, LoopDim, Count>> fs) {
  Mapping m = trivial_mapping(levels);
  for (auto [j, d, f] : fs) m.levels[j].factors[idx(d)] = f;
  normalize_orders(m);
  return m;
}

void check_oracle(const ConvLayer& layer, const AcceleratorSpec& spec, const Mapping& m) {
  INFO(spec.name << " " << layer.name << "\n" << to_text(m));
  CHECK(analytic_accesses(layer, spec, m) == interpret(layer, spec, m));
}

// Small layers: every dim at most 6 so the interpreter stays fast.
std::vector<ConvLayer> small_layers() {
  return {
      {"unit", 1, 1, 1, 1, 1, 1, 1},
      {"mq", 1, 2, 1, 1, 2, 1, 1},
      {"conv3", 1, 3, 2, 4, 4, 3, 3},
      {"odd", 2, 5, 3, 5, 3, 2, 3},
      {"batch", 3, 2, 2, 3, 3, 1, 2},
      {"wide", 1, 4, 6, 2, 5, 3, 1},
  };
}

}  // namespace

TEST_SUITE("costmodel") {

TEST_CASE("analytic counts match the interpreter on sampled mappings") {
  const std::vector<AcceleratorSpec> specs = {tiny_nvdla(), tiny_eyeriss()};
  int checked = 0;
  for (const AcceleratorSpec& spec : specs) {
    for (const ConvLayer& layer : small_layers()) {
      Rng rng(derive_seed(7, static_cast<std::uint64_t>(checked)));
      for (int i = 0; i < 40; ++i) {
        const Mapping m = sample_candidate(layer, spec, rng);
        if (!validate(m, layer, spec).empty()) continue;
        check_oracle(layer, spec, m);
        ++checked;
      }
      for (int i = 0; i < 40; ++i) {
        const auto m = random_general_mapping(layer, spec, rng);
        if (!m) continue;
        check_oracle(layer, spec, *m);
        ++checked;
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("analytic counts match the interpreter for the mappers' picks") {
  for (const AcceleratorSpec& spec : {tiny_nvdla(), tiny_eyeriss()})
    for (const ConvLayer& layer : small_layers()) {
      check_oracle(layer, spec, local_map(layer, spec).mapping);
      check_oracle(layer, spec, random_map(layer, spec, 3));
    }
  const ConvLayer layer{"mid", 1, 8, 4, 6, 6, 3, 3};
  check_oracle(layer, table_eyeriss(), local_map(layer, table_eyeriss()).mapping);
  check_oracle(layer, table_eyeriss(), random_map(layer, table_eyeriss(), 11));
}

TEST_CASE("interpreter refuses oversized iteration spaces") {
  const Mapping m = local_map(table_layer(), table_eyeriss()).mapping;
  CHECK_THROWS_AS(interpret(table_layer(), table_eyeriss(), m), ModelError);
}

TEST_CASE("loop order decides weight refetches") {
  const ConvLayer layer{"mq", 1, 2, 1, 1, 2, 1, 1};
  const AcceleratorSpec spec = tiny_nvdla();
  Mapping m_inner = with_factors(3, {{1, LoopDim::M, 2}, {1, LoopDim::Q, 2}});
  m_inner.levels[1].order = {LoopDim::M, LoopDim::Q};
  Mapping q_inner = m_inner;
  q_inner.levels[1].order = {LoopDim::Q, LoopDim::M};

  // M innermost: the weight tile changes on every step and Q repeats the walk.
  const AccessCounts a = analytic_accesses(layer, spec, m_inner);
  CHECK(a.at(1, TensorId::Weight).reads == 4);
  CHECK(a.at(0, TensorId::Weight).writes == 4);
  // Q innermost: each weight is fetched once and held across Q.
  const AccessCounts b = analytic_accesses(layer, spec, q_inner);
  CHECK(b.at(1, TensorId::Weight).reads == 2);
  CHECK(b.at(0, TensorId::Weight).writes == 2);
  // The other direction for inputs.
  CHECK(a.at(1, TensorId::Input).reads == 2);
  CHECK(b.at(1, TensorId::Input).reads == 4);
  // DRAM sees every word once either way.
  CHECK(a.at(2, TensorId::Weight).reads == 2);
  CHECK(b.at(2, TensorId::Weight).reads == 2);
  check_oracle(layer, spec, m_inner);
  check_oracle(layer, spec, q_inner);
}

TEST_CASE("imperfect factorizations skip empty tiles") {
  const ConvLayer layer{"c5", 1, 1, 5, 1, 1, 1, 1};
  const AcceleratorSpec spec = tiny_nvdla();
  const Mapping m = with_factors(3, {{0, LoopDim::C, 2}, {1, LoopDim::C, 2}, {2, LoopDim::C, 2}});
  REQUIRE(validate(m, layer, spec).empty());
  const AccessCounts a = analytic_accesses(layer, spec, m);
  CHECK(a.at(1, TensorId::Weight).reads == 5);
  CHECK(a.at(1, TensorId::Input).reads == 5);
  CHECK(a.at(2, TensorId::Weight).reads == 5);
  CHECK(a.at(0, TensorId::Weight).reads == 5);  // one per MAC
  check_oracle(layer, spec, m);
}

TEST_CASE("single-MAC layer") {
  const ConvLayer layer{"unit", 1, 1, 1, 1, 1, 1, 1};
  const AcceleratorSpec spec = tiny_nvdla();
  const Mapping m = trivial_mapping(3);
  const AccessCounts a = analytic_accesses(layer, spec, m);
  CHECK(a.at(0, TensorId::Weight).reads == 1);
  CHECK(a.at(0, TensorId::Input).reads == 1);
  CHECK(a.at(0, TensorId::Output).reads == 1 + 1);  // MAC read plus drain
  CHECK(a.at(0, TensorId::Output).writes == 1);     // MAC update; first touch needs no fill
  CHECK(a.at(0, TensorId::Weight).writes == 1);
  for (int i = 1; i < 3; ++i) {
    CHECK(a.at(i, TensorId::Weight).reads == 1);
    CHECK(a.at(i, TensorId::Input).reads == 1);
    CHECK(a.at(i, TensorId::Output).reads == (i == 1 ? 1 : 0));
    CHECK(a.at(i, TensorId::Output).writes == 1);
  }
  const CostReport r = cost(layer, spec, m);
  CHECK(r.mac_energy_total == doctest::Approx(1.0));
  CHECK(r.compute_cycles == 1);
  check_oracle(layer, spec, m);
}

TEST_CASE("a layer that fits in L0 reads DRAM once per word") {
  const ConvLayer layer{"small", 1, 2, 2, 2, 2, 1, 1};
  const AcceleratorSpec spec = tiny_nvdla();
  const Mapping m = with_factors(3, {{0, LoopDim::M, 2}, {0, LoopDim::C, 2},
                                     {0, LoopDim::P, 2}, {0, LoopDim::Q, 2}});
  REQUIRE(validate(m, layer, spec).empty());
  const AccessCounts a = analytic_accesses(layer, spec, m);
  CHECK(a.at(2, TensorId::Weight).reads == tensor_size(layer, TensorId::Weight));
  CHECK(a.at(2, TensorId::Input).reads == tensor_size(layer, TensorId::Input));
  CHECK(a.at(2, TensorId::Output).reads == 0);
  CHECK(a.at(2, TensorId::Output).writes == tensor_size(layer, TensorId::Output));
  check_oracle(layer, spec, m);
}

TEST_CASE("an irrelevant outer loop multiplies refetches by its trip count") {
  const AcceleratorSpec spec = tiny_nvdla();
  const ConvLayer one{"n1", 1, 2, 2, 2, 2, 1, 1};
  ConvLayer two = one;
  two.bounds[idx(LoopDim::N)] = 2;
  const Mapping base = with_factors(3, {{0, LoopDim::M, 2}, {1, LoopDim::C, 2},
                                        {1, LoopDim::P, 2}, {1, LoopDim::Q, 2}});
  Mapping batched = base;
  batched.levels[2].factors[idx(LoopDim::N)] = 2;
  normalize_orders(batched);
  REQUIRE(validate(base, one, spec).empty());
  REQUIRE(validate(batched, two, spec).empty());
  const AccessCounts a = analytic_accesses(one, spec, base);
  const AccessCounts b = analytic_accesses(two, spec, batched);
  // N at DRAM sits outside the weight loops at L1, so L1 refills L0 twice.
  CHECK(b.at(1, TensorId::Weight).reads == 2 * a.at(1, TensorId::Weight).reads);
  // No weight loop above L1: the weights stay resident there across N.
  CHECK(b.at(2, TensorId::Weight).reads == a.at(2, TensorId::Weight).reads);
  // Inputs and outputs depend on N: twice the data, twice the traffic.
  CHECK(b.at(2, TensorId::Input).reads == 2 * a.at(2, TensorId::Input).reads);
  CHECK(b.at(2, TensorId::Output).writes == 2 * a.at(2, TensorId::Output).writes);
  check_oracle(two, spec, batched);
}

TEST_CASE("energy properties") {
  const ConvLayer layer{"conv3", 1, 3, 2, 4, 4, 3, 3};
  AcceleratorSpec spec = tiny_eyeriss();
  spec.mac_energy = 1.0;
  Rng rng(5);
  for (int i = 0; i < 60; ++i) {
    const Mapping m = sample_candidate(layer, spec, rng);
    if (!validate(m, layer, spec).empty()) continue;
    const CostReport r = cost(layer, spec, m);

    // MAC energy does not depend on the mapping.
    CHECK(r.mac_energy_total == doctest::Approx(static_cast<double>(mac_count(layer))));

    // Zero per-access energies leave only compute.
    AcceleratorSpec free = spec;
    for (auto& l : free.levels) l.energy_per_access = 0;
    CHECK(cost(layer, free, m).total_energy == doctest::Approx(r.mac_energy_total));

    // Scaling every energy scales the total.
    AcceleratorSpec scaled = spec;
    for (auto& l : scaled.levels) l.energy_per_access *= 3;
    scaled.mac_energy *= 3;
    CHECK(cost(layer, scaled, m).total_energy == doctest::Approx(3 * r.total_energy));

    // Dearer DRAM never makes a mapping cheaper.
    AcceleratorSpec dear = spec;
    dear.levels.back().energy_per_access *= 2;
    CHECK(cost(layer, dear, m).total_energy >= r.total_energy);

    // Every word leaves DRAM at least once; every output lands there.
    const int dram_i = spec.dram_index();
    CHECK(r.accesses.at(dram_i, TensorId::Weight).reads >= tensor_size(layer, TensorId::Weight));
    CHECK(r.accesses.at(dram_i, TensorId::Input).reads >= tensor_size(layer, TensorId::Input));
    CHECK(r.accesses.at(dram_i, TensorId::Output).writes >= tensor_size(layer, TensorId::Output));

    double sum = r.mac_energy_total;
    for (double e : r.energy_by_level) sum += e;
    CHECK(r.total_energy == doctest::Approx(sum));
    CHECK(r.cycles >= r.compute_cycles);
    CHECK(r.compute_cycles == ceil_div(mac_count(layer), m.spatial.x_factor * m.spatial.y_factor));
  }
}

TEST_CASE("cost rejects invalid mappings") {
  const ConvLayer layer{"mq", 1, 2, 1, 1, 2, 1, 1};
  CHECK_THROWS_AS(cost(layer, tiny_nvdla(), trivial_mapping(3)), ModelError);
}

}

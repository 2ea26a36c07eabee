#include <doctest.h>

#include <set>

#include "localmap/error.hpp"
#include "localmap/mappers.hpp"
#include "test_support.hpp"

using namespace localmap;
using namespace localmap::testing;

namespace {

AcceleratorSpec nvdla16() {
  AcceleratorSpec s;
  s.name = "nvdla";
  s.style = ArchStyle::NvdlaLike;
  s.pe = {16, 16};
  s.levels = {level("L0", 256, 16, 1, 1), level("L1", 65536, 64, 1, 6), dram()};
  return s;
}

const ConvLayer kOnes{"ones", 1, 1, 1, 1, 1, 1, 1};

}  // namespace

TEST_SUITE("mappers") {

TEST_CASE("rng is deterministic and bounded") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.below(7);
    CHECK(x == b.below(7));
    CHECK(x < 7);
  }
  CHECK(Rng(1).below(1) == 0);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}

TEST_CASE("ordered factorizations") {
  CHECK(ordered_factorizations(1, 3).size() == 1);
  CHECK(ordered_factorizations(12, 2).size() == 6);
  // 12 = 2^2 * 3 over three slots: C(4,2) * C(3,2) = 18.
  const auto f = ordered_factorizations(12, 3);
  CHECK(f.size() == 18);
  for (const auto& v : f) CHECK(v[0] * v[1] * v[2] == 12);
}

TEST_CASE("LOCAL parallelizes along the style's dims") {
  const auto eyeriss = local_parallelize(table_layer(), table_eyeriss());
  CHECK(eyeriss.x_dim == LoopDim::Q);
  CHECK(eyeriss.x_factor == 14);
  CHECK(eyeriss.y_dim == LoopDim::S);
  CHECK(eyeriss.y_factor == 3);

  const ConvLayer cm{"cm", 1, 64, 64, 8, 8, 3, 3};
  const auto nv = local_parallelize(cm, nvdla16());
  CHECK(nv.x_dim == LoopDim::C);
  CHECK(nv.y_dim == LoopDim::M);
  CHECK(nv.x_factor == 16);
  CHECK(nv.y_factor == 16);

  const MapperResult r = local_map(cm, nvdla16());
  CHECK(r.report.utilization == doctest::Approx(1.0));
  const MapperResult e = local_map(table_layer(), table_eyeriss());
  CHECK(e.report.utilization == doctest::Approx(42.0 / 168.0));
}

TEST_CASE("LOCAL costs one candidate and returns a valid mapping") {
  const std::vector<AcceleratorSpec> specs = {table_eyeriss(), nvdla16(), tiny_nvdla(),
                                              tiny_eyeriss()};
  const std::vector<ConvLayer> layers = {table_layer(), kOnes,
                                         {"odd", 3, 37, 22, 55, 55, 5, 3},
                                         {"fc", 1, 1000, 4096, 1, 1, 1, 1}};
  for (const auto& spec : specs)
    for (const auto& layer : layers) {
      const MapperResult r = local_map(layer, spec);
      CHECK(r.candidates_evaluated == 1);
      CHECK(validate(r.mapping, layer, spec).empty());
      CHECK(r.report.total_energy == doctest::Approx(cost(layer, spec, r.mapping).total_energy));
      // Larger factors sit innermost.
      for (const auto& lt : r.mapping.levels)
        for (std::size_t i = 1; i < lt.order.size(); ++i)
          CHECK(lt.factor(lt.order[i - 1]) >= lt.factor(lt.order[i]));
    }
}

TEST_CASE("LOCAL gives up when no unit tile fits") {
  AcceleratorSpec spec = tiny_nvdla(2);
  CHECK_THROWS_WITH_AS(local_map(table_layer(), spec), doctest::Contains("too small"),
                       ModelError);
}

TEST_CASE("random mappings are valid and seed-deterministic") {
  const AcceleratorSpec spec = table_eyeriss();
  std::set<std::string> distinct;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Mapping m = random_map(table_layer(), spec, seed);
    CHECK(validate(m, table_layer(), spec).empty());
    distinct.insert(to_text(m));
  }
  CHECK(distinct.size() > 900);
  CHECK(random_map(table_layer(), spec, 17) == random_map(table_layer(), spec, 17));
  CHECK(random_map(kOnes, spec, 3) == trivial_mapping(spec.num_levels()));
}

TEST_CASE("sampling honours constraints") {
  const AcceleratorSpec spec = table_eyeriss();
  Rng rng(9);
  SampleConstraints c;
  c.y_dim = LoopDim::S;
  c.l0_only = {LoopDim::R};
  c.upto_l1 = {LoopDim::C};
  for (int i = 0; i < 200; ++i) {
    const Mapping m = sample_candidate(table_layer(), spec, rng, c);
    CHECK(m.spatial.y_dim == LoopDim::S);
    CHECK(m.spatial.factor(LoopDim::R) == 1);
    for (int j = 1; j < spec.num_levels(); ++j) CHECK(m.levels[j].factor(LoopDim::R) == 1);
    for (int j = 2; j < spec.num_levels(); ++j) CHECK(m.levels[j].factor(LoopDim::C) == 1);
  }
}

TEST_CASE("random experiment summary") {
  const auto ones = random_experiment(kOnes, tiny_nvdla(), 3, 1);
  CHECK(ones.count == 3);
  CHECK(ones.e_min == ones.e_med);
  CHECK(ones.e_med == ones.e_max);
  CHECK(ones.spread_min_med == 0.0);

  const ConvLayer layer{"conv3", 1, 8, 4, 6, 6, 3, 3};
  AcceleratorSpec spec = tiny_eyeriss();
  const auto s = random_experiment(layer, spec, 25, 4);
  CHECK(s.e_min <= s.e_med);
  CHECK(s.e_med <= s.e_max);
  CHECK(s.spread_med_max == doctest::Approx(1 - s.e_med / s.e_max));
  CHECK(s.spread_min_med == doctest::Approx(1 - s.e_min / s.e_med));
  CHECK(cost(layer, spec, s.min_mapping).total_energy == doctest::Approx(s.e_min));

  spec.levels.back().energy_per_access *= 2;
  CHECK(random_experiment(layer, spec, 25, 4).e_min >= s.e_min);
  CHECK_THROWS_AS(random_experiment(layer, spec, 2, 4), ModelError);
}

TEST_CASE("dataflow search returns members of the family") {
  const ConvLayer layer{"conv", 1, 16, 8, 14, 14, 3, 3};
  const std::vector<std::pair<Dataflow, AcceleratorSpec>> cases = {
      {Dataflow::RS, table_eyeriss()}, {Dataflow::WS, nvdla16()}, {Dataflow::OS, nvdla16()}};
  for (const auto& [df, spec] : cases) {
    const MapperResult r = dataflow_search(layer, spec, df, 100, 1);
    CHECK(satisfies_dataflow(df, r.mapping));
    CHECK(validate(r.mapping, layer, spec).empty());
    CHECK(r.candidates_evaluated >= 1);
    CHECK(r.candidates_evaluated <= 100);
    const MapperResult again = dataflow_search(layer, spec, df, 100, 1);
    CHECK(again.mapping == r.mapping);
  }
  const MapperResult ones = dataflow_search(kOnes, tiny_nvdla(), Dataflow::WS, 50, 1);
  CHECK(ones.candidates_evaluated == 1);
  CHECK(parse_dataflow("rs") == Dataflow::RS);
  CHECK(dataflow_name(Dataflow::OS) == "os");
  CHECK_THROWS(parse_dataflow("xx"));
}

TEST_CASE("dataflow predicates") {
  Mapping m = trivial_mapping(3);
  m.levels[0].factors[idx(LoopDim::R)] = 3;
  m.levels[1].factors[idx(LoopDim::P)] = 2;
  m.levels[1].factors[idx(LoopDim::M)] = 2;
  normalize_orders(m);
  m.levels[1].order = {LoopDim::P, LoopDim::M};
  CHECK(satisfies_dataflow(Dataflow::WS, m));
  m.levels[1].order = {LoopDim::M, LoopDim::P};
  CHECK_FALSE(satisfies_dataflow(Dataflow::WS, m));

  m.spatial = {LoopDim::Q, 1, LoopDim::S, 1};
  CHECK(satisfies_dataflow(Dataflow::RS, m));
  m.spatial.y_dim = LoopDim::M;
  CHECK_FALSE(satisfies_dataflow(Dataflow::RS, m));

  Mapping os = trivial_mapping(3);
  os.levels[2].factors[idx(LoopDim::C)] = 2;
  normalize_orders(os);
  CHECK_FALSE(satisfies_dataflow(Dataflow::OS, os));
}

TEST_CASE("exhaustive search finds the global minimum") {
  const MapperResult ones = exhaustive_search(kOnes, tiny_nvdla());
  CHECK(ones.candidates_evaluated == 1);

  const ConvLayer layer{"small", 1, 2, 2, 2, 2, 1, 1};
  const AcceleratorSpec spec = tiny_nvdla();
  const MapperResult best = exhaustive_search(layer, spec);
  CHECK(validate(best.mapping, layer, spec).empty());
  CHECK(exhaustive_space_size(layer, spec) >= best.candidates_evaluated);
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    CHECK(best.report.total_energy <= cost(layer, spec, random_map(layer, spec, seed)).total_energy);
  CHECK(best.report.total_energy <= local_map(layer, spec).report.total_energy);
  for (Dataflow df : {Dataflow::WS, Dataflow::OS, Dataflow::RS})
    CHECK(best.report.total_energy <=
          dataflow_search(layer, spec, df, 200, 2).report.total_energy);
}

TEST_CASE("exhaustive search refuses spaces above the cap") {
  const ConvLayer layer{"conv3", 1, 4, 4, 4, 4, 3, 3};
  const BigCount size = exhaustive_space_size(layer, tiny_nvdla());
  REQUIRE(size > 10);
  const std::string quoted = size.str();
  CHECK_THROWS_WITH_AS(exhaustive_search(layer, tiny_nvdla(), 10),
                       doctest::Contains(quoted.c_str()), ModelError);
}

}

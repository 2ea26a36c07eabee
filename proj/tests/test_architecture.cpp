#include <doctest.h>

#include <set>

#include "localmap/architecture.hpp"
#include "localmap/error.hpp"
#include "test_support.hpp"

using namespace localmap;
using namespace localmap::testing;

TEST_SUITE("architecture") {

TEST_CASE("capacity in words") {
  CHECK(capacity_words(level("L2", 16384, 64, 1, 6), 16) == 65'536u);
  CHECK(capacity_words(level("L0", 16, 16, 1, 1), 16) == 16u);
  CHECK(capacity_words(level("tiny", 1, 16, 1, 1), 16) == 1u);
  CHECK_FALSE(capacity_words(dram(), 16).has_value());
}

TEST_CASE("capacity is monotone in depth and width") {
  for (Count depth = 1; depth < 40; depth += 3)
    for (Count width = 16; width < 128; width += 16) {
      const auto base = *capacity_words(level("x", depth, width, 1, 1), 16);
      CHECK(*capacity_words(level("x", depth + 1, width, 1, 1), 16) >= base);
      CHECK(*capacity_words(level("x", depth, width + 16, 1, 1), 16) >= base);
    }
}

TEST_CASE("bank to PE connectivity") {
  const AcceleratorSpec eyeriss = table_eyeriss();
  const auto column = fed_pes(eyeriss, 1, 13);
  CHECK(column.size() == 12);
  for (const PeCoord& pe : column) CHECK(pe.col == 13);

  AcceleratorSpec nvdla = tiny_nvdla();
  nvdla.pe = {16, 16};
  CHECK(fed_pes(nvdla, 1, 0).size() == 256);

  const auto own = fed_pes(eyeriss, 0, 0);
  REQUIRE(own.size() == 1);
  CHECK(own.front() == PeCoord{0, 0});

  CHECK_THROWS_AS(fed_pes(eyeriss, 1, 14), ModelError);
  CHECK_THROWS_AS(fed_pes(eyeriss, 0, 168), ModelError);
  CHECK_THROWS_AS(fed_pes(eyeriss, 7, 0), ModelError);
}

TEST_CASE("every level covers all PEs; Eyeriss banks are disjoint") {
  for (const AcceleratorSpec& spec : {table_eyeriss(), tiny_nvdla(), tiny_eyeriss()}) {
    for (int i = 0; i < spec.num_levels(); ++i) {
      const Count banks = i == 0 ? spec.pe.total() : spec.levels[i].bank_count;
      std::set<PeCoord> seen;
      std::size_t total = 0;
      for (Count b = 0; b < banks; ++b) {
        const auto pes = fed_pes(spec, i, b);
        total += pes.size();
        seen.insert(pes.begin(), pes.end());
      }
      CHECK(seen.size() == spec.pe.total());
      if (spec.style == ArchStyle::EyerissLike && i == 1) CHECK(total == seen.size());
    }
  }
}

TEST_CASE("spec validation") {
  CHECK(validate_spec(table_eyeriss()).empty());
  CHECK(validate_spec(tiny_nvdla()).empty());

  AcceleratorSpec wrong_banks = table_eyeriss();
  wrong_banks.levels[1].bank_count = 12;
  CHECK(validate_spec(wrong_banks).size() == 1);

  AcceleratorSpec two_dram = tiny_nvdla();
  two_dram.levels[1] = dram();
  CHECK_FALSE(validate_spec(two_dram).empty());

  AcceleratorSpec three_levels = tiny_nvdla();
  three_levels.levels.insert(three_levels.levels.begin() + 1, level("X", 8, 16, 1, 1));
  CHECK_FALSE(validate_spec(three_levels).empty());

  AcceleratorSpec zero_depth = tiny_nvdla();
  zero_depth.levels[0].depth = 0;
  CHECK_FALSE(validate_spec(zero_depth).empty());
}

}

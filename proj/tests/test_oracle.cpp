#include <doctest.h>

#include <random>

#include "hugenfold/oracle.hpp"
#include "support.hpp"

using namespace hugenfold;
using testsupport::iv;

TEST_CASE("bf_graver examples") {
  CHECK(oracle::bf_graver(IntMatrix::from_rows({{1, -1}}), 2) == std::vector<IntVec>{iv({-1, -1}), iv({1, 1})});
  CHECK(oracle::bf_graver(IntMatrix::from_rows({{1, 1, -1}}), 3).size() == 6);
  CHECK(oracle::bf_graver(IntMatrix::from_rows({{1, 1, 1, 1}}), 1).size() == 12);
  CHECK_THROWS_AS(oracle::bf_graver(IntMatrix(1, 8), 20, 1000), BudgetError);
}

TEST_CASE("bf_tables examples and scan-order agreement") {
  const auto sym = testsupport::search_of(testsupport::symmetric_2x2x4());
  const auto all = oracle::bf_tables(sym, false);
  CHECK(all.feasible);
  CHECK(all.tables.size() == 6);  // choose which 2 of 4 layers are identity
  CHECK(oracle::bf_tables(sym, false, oracle::TableScan::LineMajor).tables.size() == 6);
  CHECK_FALSE(oracle::bf_tables(testsupport::search_of(testsupport::contradiction_2x2x1()), false).feasible);

  oracle::TableSearch zero;
  zero.l = zero.m = 2;
  zero.line_sums = IntMatrix(2, 2);
  zero.row_sums = {iv({0, 0}), iv({0, 0})};
  zero.col_sums = {iv({0, 0}), iv({0, 0})};
  const auto z = oracle::bf_tables(zero, false);
  REQUIRE(z.tables.size() == 1);
  CHECK(z.tables[0] == oracle::Table{iv({0, 0, 0, 0}), iv({0, 0, 0, 0})});

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 3;
    std::vector<std::pair<IntVec, IntVec>> layers;
    Int total = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const long long s = static_cast<long long>(rng() % 3);
      layers.push_back({testsupport::random_margin(rng, 3, s), testsupport::random_margin(rng, 3, s)});
      total += s;
    }
    IntMatrix g(3, 3);
    for (Int u = 0; u < total; ++u) g(rng() % 3, rng() % 3) += 1;
    const auto search = testsupport::search_of(testsupport::table_of(3, 3, g, layers));
    const auto a = oracle::bf_tables(search, false, oracle::TableScan::LayerMajor);
    const auto b = oracle::bf_tables(search, false, oracle::TableScan::LineMajor);
    CHECK(a.feasible == b.feasible);
    std::vector<oracle::Table> ta = a.tables, tb = b.tables;
    std::sort(ta.begin(), ta.end());
    std::sort(tb.begin(), tb.end());
    CHECK(ta == tb);
  }
}

TEST_CASE("bf_nfold examples and order agreement") {
  // Unique point: x + y = 2 with x, y in [1, 1].
  BrickType ty{iv({1, 1}), {ExtInt(1), ExtInt(1)}, {ExtInt(1), ExtInt(1)}, iv({2}), Int(2)};
  HugeNFoldInstance unique(Bimatrix(IntMatrix::from_rows({{1, 0}}), IntMatrix::from_rows({{1, 1}})), {ty}, iv({2}));
  const auto u = oracle::bf_nfold(unique);
  REQUIRE(u.feasible);
  CHECK(u.bricks == std::vector<IntVec>{iv({1, 1}), iv({1, 1})});
  CHECK(u.optimum == 4);
  HugeNFoldInstance off(unique.bimatrix(), unique.types(), iv({3}));
  CHECK_FALSE(oracle::bf_nfold(off).feasible);

  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    testsupport::NFoldShape sh;
    sh.d = 2 + rng() % 2;
    sh.t = 1 + rng() % 2;
    HugeNFoldInstance inst = testsupport::random_nfold(rng, sh);
    const auto a = oracle::bf_nfold(inst, false);
    const auto b = oracle::bf_nfold(inst, true);
    CHECK(a.feasible == b.feasible);
    if (a.feasible) {
      CHECK(a.optimum == b.optimum);
      CHECK(a.bricks == b.bricks);
    }
  }
}

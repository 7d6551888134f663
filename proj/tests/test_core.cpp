#include <doctest.h>

#include <random>

#include "hugenfold/core.hpp"
#include "support.hpp"

using namespace hugenfold;
using testsupport::iv;

TEST_CASE("Int parses and prints decimal text exactly") {
  const std::string big = "-123456789012345678901234567890123456789";
  CHECK(to_string(parse_int(big)) == big);
  CHECK(parse_int("+42") == 42);
  CHECK_THROWS_AS(parse_int("12x"), Error);
  CHECK_THROWS_AS(parse_int(""), Error);
}

TEST_CASE("200-bit arithmetic round-trips") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Int a = 0, b = 0;
    for (int w = 0; w < 4; ++w) {
      a = (a << 50) + Int(rng() >> 14);
      b = (b << 50) + Int(rng() >> 14);
    }
    if (rng() % 2) a = -a;
    CHECK((a + b) - b == a);
    CHECK(a * b / b == a);
  }
}

TEST_CASE("ExtInt order and infinities") {
  const ExtInt ninf = ExtInt::neg_inf(), pinf = ExtInt::pos_inf();
  CHECK(ninf < ExtInt(-1000000));
  CHECK(ExtInt(5) < pinf);
  CHECK(ExtInt(3) == Int(3));
  CHECK((ExtInt(2) + pinf).is_pos_inf());
  CHECK((ninf - ExtInt(7)).is_neg_inf());
  CHECK_THROWS_AS(pinf - pinf, Error);
  CHECK_THROWS_AS(ninf + pinf, Error);
  CHECK(ExtInt::parse("inf").is_pos_inf());
  CHECK(ExtInt::parse("-inf").is_neg_inf());
  CHECK(ExtInt::parse("-17") == Int(-17));
  CHECK(pinf.str() == "inf");
  CHECK_THROWS_AS(pinf.value(), Error);
}

TEST_CASE("nfold_product block pattern") {
  SUBCASE("1x1 blocks, n = 2") {
    Bimatrix a(IntMatrix::from_rows({{1}}), IntMatrix::from_rows({{1}}));
    CHECK(nfold_product(a, 2) == IntMatrix::from_rows({{1, 1}, {1, 0}, {0, 1}}));
  }
  SUBCASE("n = 1 stacks A1 over A2") {
    Bimatrix a(IntMatrix::from_rows({{1, 2}, {3, 4}}), IntMatrix::from_rows({{5, 6}}));
    CHECK(nfold_product(a, 1) == IntMatrix::from_rows({{1, 2}, {3, 4}, {5, 6}}));
  }
  SUBCASE("A1 = [1 1], A2 = [1 -1], n = 2") {
    Bimatrix a(IntMatrix::from_rows({{1, 1}}), IntMatrix::from_rows({{1, -1}}));
    CHECK(nfold_product(a, 2) == IntMatrix::from_rows({{1, 1, 1, 1}, {1, -1, 0, 0}, {0, 0, 1, -1}}));
  }
  SUBCASE("refuses past the column threshold") {
    Bimatrix a(IntMatrix::from_rows({{1, 1}}), IntMatrix::from_rows({{1, -1}}));
    CHECK_NOTHROW(nfold_product(a, kMaxMaterializedColumns / 2));
    CHECK_THROWS_AS(nfold_product(a, kMaxMaterializedColumns / 2 + 1), DimensionError);
  }
}

TEST_CASE("nfold_product times x matches the blockwise formula") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t r = 1 + rng() % 2, s = 1 + rng() % 2, d = 1 + rng() % 3, n = 1 + rng() % 4;
    IntMatrix a1(r, d), a2(s, d);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < d; ++j) a1(i, j) = static_cast<long long>(rng() % 7) - 3;
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < d; ++j) a2(i, j) = static_cast<long long>(rng() % 7) - 3;
    Bimatrix a(a1, a2);
    IntVec x(n * d);
    for (auto& v : x) v = static_cast<long long>(rng() % 11) - 5;
    IntVec expect = zeros(r);
    IntVec lower;
    for (std::size_t i = 0; i < n; ++i) {
      std::span<const Int> brick(x.data() + i * d, d);
      expect = add(expect, matvec(a1, brick));
      for (const auto& v : matvec(a2, brick)) lower.push_back(v);
    }
    expect.insert(expect.end(), lower.begin(), lower.end());
    CHECK(matvec(nfold_product(a, n), x) == expect);
  }
}

TEST_CASE("matvec dot and in_box") {
  CHECK(matvec(IntMatrix::identity(2), iv({3, -5})) == iv({3, -5}));
  CHECK(dot(iv({1, 2}), iv({2, -1})) == 0);
  const ExtVec lo{ExtInt(0), ExtInt::neg_inf()}, hi{ExtInt(0), ExtInt::pos_inf()};
  CHECK(in_box(iv({0, 7}), lo, hi));
  CHECK_FALSE(in_box(iv({1, 7}), lo, hi));
  CHECK_THROWS_AS(dot(iv({1}), iv({1, 2})), DimensionError);
  CHECK_THROWS_AS(matvec(IntMatrix::identity(3), iv({1, 2})), DimensionError);
}

TEST_CASE("Bimatrix rejects mismatched widths") {
  CHECK_THROWS_AS(Bimatrix(IntMatrix::from_rows({{1, 2}}), IntMatrix::from_rows({{1}})), DimensionError);
}

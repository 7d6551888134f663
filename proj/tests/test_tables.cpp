#include <doctest.h>

#include <random>

#include "hugenfold/oracle.hpp"
#include "hugenfold/presentation.hpp"
#include "hugenfold/tables.hpp"
#include "support.hpp"

using namespace hugenfold;
using testsupport::iv;

namespace {

/// Balanced but infeasible: layers forced to cells (1,1), (2,2) and (1,2)
/// against line sums on (1,2) and (2,1). Only the third layer fits.
HugeTableInstance diagonal_clash() {
  HugeTableInstance t;
  t.l = t.m = 2;
  t.line_sums = IntMatrix::from_rows({{0, 2}, {1, 0}});
  t.types.push_back({iv({1, 0}), iv({1, 0}), Int(1)});
  t.types.push_back({iv({0, 1}), iv({0, 1}), Int(1)});
  t.types.push_back({iv({1, 0}), iv({0, 1}), Int(1)});
  return t;
}

SolveOptions with(Strategy s) {
  SolveOptions o;
  o.strategy = s;
  return o;
}

}  // namespace

TEST_CASE("encode_table") {
  HugeNFoldInstance inst = encode_table(testsupport::symmetric_2x2x4());
  CHECK(inst.bimatrix().a1() == IntMatrix::identity(4));
  CHECK(inst.bimatrix().a2() == IntMatrix::from_rows({{1, 0, 1, 0}, {0, 1, 0, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}}));
  CHECK(matvec(inst.bimatrix().a2(), iv({1, 0, 0, 1})) == iv({1, 1, 1, 1}));
  CHECK(inst.b0() == iv({2, 2, 2, 2}));
  CHECK(inst.type(0).b == iv({1, 1, 1, 1}));
  CHECK(inst.n() == 4);

  const Bimatrix b3 = table_bimatrix(3, 3);
  CHECK(b3.r() == 9);
  CHECK(b3.d() == 9);
  CHECK(b3.s() == 6);

  HugeTableInstance bad = testsupport::symmetric_2x2x4();
  bad.types[0].rows = iv({1, -1});
  CHECK_THROWS_AS(encode_table(bad), PreconditionError);
  bad = testsupport::symmetric_2x2x4();
  bad.types[0].count = 0;
  CHECK_THROWS_AS(encode_table(bad), PreconditionError);
}

TEST_CASE("layer_matrix inverts the cell order") {
  const IntMatrix m = layer_matrix(iv({1, 2, 3, 4, 5, 6}), 2, 3);
  CHECK(m == IntMatrix::from_rows({{1, 3, 5}, {2, 4, 6}}));
}

TEST_CASE("build_auxiliary") {
  HugeNFoldInstance inst = encode_table(testsupport::symmetric_2x2x4());
  Auxiliary ax = build_auxiliary(inst);
  CHECK(ax.aux.bimatrix().d() == 4 + 4 + 4);
  CHECK(check_presentation(ax.aux, ax.cp0).ok());
  CHECK(cost(ax.aux, ax.cp0) == 24);
  REQUIRE(ax.cp0.types.size() == 1);
  CHECK(ax.cp0.types[0].size() == 2);

  HugeTableInstance single = testsupport::symmetric_2x2x4();
  single.types[0].count = 1;
  single.line_sums = IntMatrix::from_rows({{1, 0}, {0, 1}});
  Auxiliary one = build_auxiliary(encode_table(single));
  CHECK(one.cp0.types[0].size() == 1);
  CHECK(check_presentation(one.aux, one.cp0).ok());

  BrickType neg{iv({0}), {ExtInt(-1)}, {ExtInt(3)}, iv({0}), Int(1)};
  HugeNFoldInstance lower(Bimatrix(IntMatrix::from_rows({{1}}), IntMatrix::from_rows({{0}})), {neg}, iv({0}));
  CHECK_THROWS_AS(build_auxiliary(lower), PreconditionError);
}

TEST_CASE("solve_table on the 2x2x4 symmetric instance") {
  const HugeTableInstance tbl = testsupport::symmetric_2x2x4();
  const CompactPresentation expect{{BrickMap{{iv({0, 1, 1, 0}), 2}, {iv({1, 0, 0, 1}), 2}}}};
  for (Strategy s : {Strategy::Augment, Strategy::Cone}) {
    TableVerdict v = solve_table(tbl, with(s));
    REQUIRE(v.feasible);
    CHECK(*v.solution == expect);
    CHECK(check_presentation(encode_table(tbl), *v.solution).ok());
  }
  CHECK(oracle::bf_tables(testsupport::search_of(tbl), true).feasible);
}

TEST_CASE("balance certificates") {
  const HugeTableInstance tbl = testsupport::contradiction_2x2x1();
  auto w = balance_witness(tbl);
  REQUIRE(w);
  for (Strategy s : {Strategy::Augment, Strategy::Cone}) {
    TableVerdict v = solve_table(tbl, with(s));
    CHECK_FALSE(v.feasible);
    REQUIRE(v.certificate);
    CHECK(v.certificate->transcript.method == "balance");
    CHECK(verify_certificate(*v.certificate));
  }
  CHECK_FALSE(balance_witness(testsupport::symmetric_2x2x4()).has_value());
  CHECK_FALSE(oracle::bf_tables(testsupport::search_of(tbl), true).feasible);

  InfeasibilityCertificate cert = *solve_table(tbl).certificate;
  SUBCASE("witness u tampered") {
    cert.witness->u[0] += 1;
    CHECK_FALSE(verify_certificate(cert));
  }
  SUBCASE("witness dropped") {
    cert.witness.reset();
    CHECK_FALSE(verify_certificate(cert));
  }
  SUBCASE("slack tampered") {
    cert.slack += 1;
    CHECK_FALSE(verify_certificate(cert));
  }
  SUBCASE("relabelled as explicit") {
    cert.transcript.method = "explicit";
    CHECK_FALSE(verify_certificate(cert));
  }
  SUBCASE("bound to its instance") {
    CHECK(verify_certificate(encode_table(tbl), cert));
    HugeTableInstance other = tbl;
    other.line_sums(1, 1) = 2;
    CHECK_FALSE(verify_certificate(encode_table(other), cert));
  }
}

TEST_CASE("explicit certificates") {
  const HugeTableInstance tbl = diagonal_clash();
  CHECK_FALSE(balance_witness(tbl).has_value());
  CHECK_FALSE(oracle::bf_tables(testsupport::search_of(tbl), true).feasible);
  for (Strategy s : {Strategy::Augment, Strategy::Cone}) {
    TableVerdict v = solve_table(tbl, with(s));
    CHECK_FALSE(v.feasible);
    REQUIRE(v.certificate);
    CHECK(v.certificate->transcript.method == "explicit");
    CHECK(v.certificate->slack > 0);
    CHECK(verify_certificate(*v.certificate));
  }

  const InfeasibilityCertificate good = *solve_table(tbl).certificate;
  SUBCASE("non-optimal phase-I point") {
    // Move one unit of a placed cell into its slack: still feasible, 3 more slack.
    InfeasibilityCertificate cert = good;
    const Bimatrix& c = cert.aux.bimatrix();
    bool moved = false;
    for (auto& m : cert.cp.types) {
      for (auto it = m.begin(); it != m.end() && !moved; ++it) {
        for (std::size_t j = 0; j < 4 && !moved; ++j) {
          if (it->first[j] <= 0) continue;
          IntVec z = it->first;
          z[j] -= 1;
          z[4 + j] += 1;
          for (std::size_t i = 0; i < 4; ++i) z[8 + i] += c.a2()(i, j);
          const Int mult = it->second;
          m.erase(it);
          m[z] += mult;
          moved = true;
        }
      }
      if (moved) break;
    }
    REQUIRE(moved);
    cert.slack = cost(cert.aux, cert.cp);
    cert.transcript.optimum = cert.slack;
    CHECK(check_presentation(cert.aux, cert.cp).ok());
    CHECK(cert.slack == good.slack + 3);
    CHECK_FALSE(verify_certificate(cert));
  }
  SUBCASE("slack claimed zero") {
    InfeasibilityCertificate cert = good;
    cert.slack = 0;
    CHECK_FALSE(verify_certificate(cert));
  }
  SUBCASE("presentation count changed") {
    InfeasibilityCertificate cert = good;
    cert.cp.types[0].begin()->second += 1;
    CHECK_FALSE(verify_certificate(cert));
  }
  SUBCASE("unknown method") {
    InfeasibilityCertificate cert = good;
    cert.transcript.method = "trust-me";
    CHECK_FALSE(verify_certificate(cert));
  }
  SUBCASE("auxiliary costs altered") {
    std::vector<BrickType> types = good.aux.types();
    types[0].w.back() = 0;
    InfeasibilityCertificate cert{HugeNFoldInstance(good.aux.bimatrix(), types, good.aux.b0()), good.cp, good.slack,
                                  good.transcript, good.witness};
    CHECK_FALSE(verify_certificate(cert));
  }
}

TEST_CASE("explicit slack optimum agrees with the table oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const long long n = 1 + static_cast<long long>(rng() % 3);
    std::vector<std::pair<IntVec, IntVec>> layers;
    IntMatrix g(2, 2);
    for (long long k = 0; k < n; ++k) {
      const long long s = static_cast<long long>(rng() % 3);
      layers.push_back({testsupport::random_margin(rng, 2, s), testsupport::random_margin(rng, 2, s)});
    }
    Int total = 0;
    for (const auto& ly : layers) total += ly.first[0] + ly.first[1];
    for (Int u = 0; u < total; ++u) g(rng() % 2, rng() % 2) += 1;
    HugeTableInstance tbl = testsupport::table_of(2, 2, g, layers);
    Auxiliary ax = build_auxiliary(encode_table(tbl));
    SlackOptimum opt = explicit_slack_optimum(ax.aux);
    CHECK(check_presentation(ax.aux, opt.cp).ok());
    CHECK(cost(ax.aux, opt.cp) == opt.value);
    CHECK((opt.value == 0) == oracle::bf_tables(testsupport::search_of(tbl), true).feasible);
  }
}

TEST_CASE("feasible verdicts reproduce the margins") {
  std::mt19937_64 rng(37);
  int feasible = 0;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::pair<IntVec, IntVec>> layers;
    IntMatrix g(3, 3);
    const long long n = 1 + static_cast<long long>(rng() % 3);
    for (long long k = 0; k < n; ++k) {
      const long long s = static_cast<long long>(rng() % 3);
      IntVec rows = testsupport::random_margin(rng, 3, s), cols = testsupport::random_margin(rng, 3, s);
      // Plant a layer with these margins (northwest corner rule) so g is feasible.
      IntVec rr = rows, cc = cols;
      for (std::size_t i = 0, j = 0; i < 3 && j < 3;) {
        Int x = rr[i] < cc[j] ? rr[i] : cc[j];
        g(i, j) += x;
        rr[i] -= x;
        cc[j] -= x;
        if (rr[i] == 0) ++i; else ++j;
      }
      layers.push_back({rows, cols});
    }
    HugeTableInstance tbl = testsupport::table_of(3, 3, g, layers);
    TableVerdict v = solve_table(tbl);
    REQUIRE(v.feasible);
    ++feasible;
    HugeNFoldInstance inst = encode_table(tbl);
    CHECK(check_presentation(inst, *v.solution).ok());
    CHECK(aggregate(*v.solution, 9).total == inst.b0());
    for (std::size_t k = 0; k < inst.num_types(); ++k) {
      CHECK(type_count(v.solution->types[k]) == tbl.types[k].count);
      CHECK(v.solution->types[k].size() <= 512);
      for (const auto& [z, lambda] : v.solution->types[k]) {
        const IntMatrix layer = layer_matrix(z, 3, 3);
        for (std::size_t i = 0; i < 3; ++i) {
          Int row = 0;
          for (std::size_t j = 0; j < 3; ++j) row += layer(i, j);
          CHECK(row == tbl.types[k].rows[i]);
        }
      }
    }
  }
  CHECK(feasible == 40);
}

TEST_CASE("verdicts are stable under scaling") {
  HugeTableInstance base;
  base.l = base.m = 3;
  base.types.push_back({iv({1, 1, 1}), iv({1, 1, 1}), Int(2)});
  base.types.push_back({iv({1, 1, 1}), iv({1, 2, 0}), Int(1)});
  // Row sums (3,3,3), column sums (3,4,2): balanced.
  base.line_sums = IntMatrix::from_rows({{2, 1, 0}, {0, 2, 1}, {1, 1, 1}});
  const bool small = solve_table(base).feasible;
  CHECK(small == oracle::bf_tables(testsupport::search_of(base), true).feasible);
  HugeTableInstance big = base;
  const Int factor = parse_int("1000000000");
  for (auto& ty : big.types) ty.count *= factor;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) big.line_sums(i, j) *= factor;
  TableVerdict v = solve_table(big);
  CHECK(v.feasible == small);
  if (v.feasible) CHECK(check_presentation(encode_table(big), *v.solution).ok());
}

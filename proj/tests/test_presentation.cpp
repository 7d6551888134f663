#include <doctest.h>

#include <map>
#include <random>

#include "hugenfold/presentation.hpp"
#include "hugenfold/tables.hpp"
#include "support.hpp"

using namespace hugenfold;
using testsupport::iv;

namespace {

/// d free coordinates in [-bound, bound], one type of `count` bricks.
HugeNFoldInstance free_instance(std::size_t d, const Int& count, long long bound = 100, IntVec w = {}) {
  IntMatrix a1(1, d), a2(1, d);
  BrickType ty;
  ty.w = w.empty() ? zeros(d) : w;
  ty.lower.assign(d, ExtInt(-bound));
  ty.upper.assign(d, ExtInt(bound));
  ty.b = zeros(1);
  ty.count = count;
  return HugeNFoldInstance(Bimatrix(a1, a2), {ty}, zeros(1));
}

struct Conserved {
  std::vector<Int> counts;
  std::vector<IntVec> sums;
  Int cost;
};

Conserved conserved(const HugeNFoldInstance& inst, const CompactPresentation& cp) {
  Aggregate ag = aggregate(cp, inst.bimatrix().d());
  Conserved c;
  for (const auto& m : cp.types) c.counts.push_back(type_count(m));
  c.sums = ag.per_type;
  c.cost = cost(inst, cp);
  return c;
}

}  // namespace

TEST_CASE("check_presentation on the 2x2x4 symmetric table") {
  const HugeNFoldInstance inst = encode_table(testsupport::symmetric_2x2x4());
  const IntVec ident = iv({1, 0, 0, 1}), swap = iv({0, 1, 1, 0});
  SUBCASE("identity x2 + swap x2 is feasible") {
    CompactPresentation cp{{BrickMap{{ident, 2}, {swap, 2}}}};
    CHECK(check_presentation(inst, cp).ok());
    Aggregate ag = aggregate(cp, 4);
    CHECK(ag.total == iv({2, 2, 2, 2}));
    CHECK(cost(inst, cp) == 0);
  }
  SUBCASE("identity x4 misses the line sums") {
    const auto rep = check_presentation(inst, CompactPresentation{{BrickMap{{ident, 4}}}});
    CHECK(rep.structural_ok);
    CHECK(rep.bricks_ok);
    CHECK(rep.counts_ok);
    CHECK_FALSE(rep.aggregate_ok);
  }
  SUBCASE("one brick short") {
    const auto rep = check_presentation(inst, CompactPresentation{{BrickMap{{ident, 1}, {swap, 2}}}});
    CHECK_FALSE(rep.counts_ok);
    CHECK_FALSE(rep.ok());
  }
  SUBCASE("illegal brick") {
    const auto rep = check_presentation(inst, CompactPresentation{{BrickMap{{iv({1, 1, 0, 0}), 4}}}});
    CHECK_FALSE(rep.bricks_ok);
  }
  SUBCASE("empty support and wrong type count") {
    CHECK_FALSE(check_presentation(inst, CompactPresentation{{BrickMap{}}}).structural_ok);
    CHECK_FALSE(check_presentation(inst, CompactPresentation{}).structural_ok);
    CHECK_THROWS_AS(aggregate(CompactPresentation{{BrickMap{}}}, 4), PreconditionError);
  }
  SUBCASE("non-positive multiplicity") {
    CompactPresentation cp{{BrickMap{{ident, 4}, {swap, 0}}}};
    CHECK_FALSE(check_presentation(inst, cp).structural_ok);
  }
}

TEST_CASE("aggregate of a single huge brick") {
  const Int n = parse_int("1000000000000000000000");
  CompactPresentation cp{{BrickMap{{iv({3, -1}), n}}}};
  CHECK(aggregate(cp, 2).total == IntVec{3 * n, -n});
}

TEST_CASE("expand") {
  const HugeNFoldInstance inst = encode_table(testsupport::symmetric_2x2x4());
  const IntVec ident = iv({1, 0, 0, 1}), swap = iv({0, 1, 1, 0});
  CompactPresentation cp{{BrickMap{{ident, 2}, {swap, 2}}}};
  // Lexicographic order puts the swap layer (0,...) first.
  CHECK(expand(inst, cp) == std::vector<IntVec>{swap, swap, ident, ident});
  const HugeNFoldInstance one = free_instance(2, 3);
  CHECK(expand(one, CompactPresentation{{BrickMap{{iv({1, 2}), 3}}}}) ==
        std::vector<IntVec>{iv({1, 2}), iv({1, 2}), iv({1, 2})});
  const HugeNFoldInstance huge = free_instance(2, Int(1'000'000'000));
  CHECK_THROWS_AS(expand(huge, CompactPresentation{{BrickMap{{iv({0, 0}), Int(1'000'000'000)}}}}), BudgetError);
}

TEST_CASE("reduce_support merges same-parity pairs") {
  SUBCASE("d = 1 midpoint") {
    const HugeNFoldInstance inst = free_instance(1, 2);
    CompactPresentation cp{{BrickMap{{iv({0}), 1}, {iv({2}), 1}}}};
    ReduceStats st;
    CompactPresentation out = reduce_support(inst, cp, &st);
    CHECK(out == CompactPresentation{{BrickMap{{iv({1}), 2}}}});
    CHECK(st.merges == 1);
    CHECK(support_potential(cp) == 4);
    CHECK(support_potential(out) == 2);
  }
  SUBCASE("distinct parities stay") {
    const HugeNFoldInstance inst = free_instance(2, 4);
    CompactPresentation cp{{BrickMap{{iv({0, 0}), 1}, {iv({1, 0}), 1}, {iv({0, 1}), 1}, {iv({1, 1}), 1}}}};
    CHECK(reduce_support(inst, cp) == cp);
  }
  SUBCASE("d = 2 even class collapses") {
    const HugeNFoldInstance inst = free_instance(2, 8);
    CompactPresentation cp{
        {BrickMap{{iv({0, 0}), 1}, {iv({2, 0}), 1}, {iv({0, 2}), 1}, {iv({2, 2}), 1}, {iv({1, 1}), 4}}}};
    CompactPresentation out = reduce_support(inst, cp);
    CHECK(out.types[0].size() <= 4);
    CHECK(aggregate(out, 2).total == iv({8, 8}));
    CHECK(type_count(out.types[0]) == 8);
  }
}

TEST_CASE("reduce_support preserves counts, sums and cost on random presentations") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng() % 3;
    IntVec w(d);
    for (auto& v : w) v = static_cast<long long>(rng() % 7) - 3;
    BrickMap m;
    const std::size_t support = 1 + rng() % 12;
    for (std::size_t i = 0; i < support; ++i) {
      IntVec z(d);
      for (auto& v : z) v = static_cast<long long>(rng() % 13) - 6;
      m[z] += Int(1 + rng() % 1000) * (rng() % 2 ? Int(1) : parse_int("1000000000000"));
    }
    const HugeNFoldInstance inst = free_instance(d, type_count(m), 6, w);
    CompactPresentation cp{{m}};
    const Conserved before = conserved(inst, cp);
    CompactPresentation out = reduce_support(inst, cp);
    const Conserved after = conserved(inst, out);
    CHECK(before.counts == after.counts);
    CHECK(before.sums == after.sums);
    CHECK(before.cost == after.cost);
    CHECK(out.types[0].size() <= (std::size_t{1} << d));
    CHECK(check_presentation(inst, out).bricks_ok);
    std::map<std::vector<bool>, int> classes;
    for (const auto& [z, lambda] : out.types[0]) {
      std::vector<bool> p;
      for (const auto& v : z) p.push_back(bit_test(abs(v), 0));
      CHECK(++classes[p] == 1);
    }
  }
}

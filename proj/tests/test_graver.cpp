#include <doctest.h>

#include <algorithm>
#include <set>

#include "hugenfold/graver.hpp"
#include "hugenfold/oracle.hpp"
#include "support.hpp"

using namespace hugenfold;
using testsupport::iv;

namespace {

std::set<IntVec> as_set(const std::vector<IntVec>& v) { return {v.begin(), v.end()}; }

Bimatrix table2x2() {
  IntMatrix a2 = IntMatrix::from_rows({{1, 0, 1, 0}, {0, 1, 0, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}});
  return Bimatrix(IntMatrix::identity(4), a2);
}

Bimatrix small_bimatrix() { return Bimatrix(IntMatrix::from_rows({{1, 1}}), IntMatrix::from_rows({{1, -1}})); }

/// All n-liftings of the elements of G(A^(g)), materialized.
std::set<IntVec> liftings(const Bimatrix& a, std::size_t g, std::size_t n) {
  std::set<IntVec> out;
  const std::size_t d = a.d();
  for (const auto& e : graver_basis(nfold_product(a, g)).elements) {
    std::vector<IntVec> bricks;
    for (std::size_t i = 0; i < g; ++i) {
      IntVec b(e.begin() + i * d, e.begin() + (i + 1) * d);
      if (!is_zero(b)) bricks.push_back(b);
    }
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + bricks.size(), true);
    std::sort(bricks.begin(), bricks.end());
    do {
      std::vector<IntVec> order = bricks;
      do {
        IntVec x = zeros(n * d);
        std::size_t next = 0;
        for (std::size_t p = 0; p < n; ++p) {
          if (!pick[p]) continue;
          std::copy(order[next].begin(), order[next].end(), x.begin() + p * d);
          ++next;
        }
        out.insert(x);
      } while (std::next_permutation(order.begin(), order.end()));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return out;
}

}  // namespace

TEST_CASE("conformal order") {
  CHECK(conformal_leq(iv({1, -2}), iv({2, -3})));
  CHECK_FALSE(conformal_leq(iv({1, 1}), iv({2, -3})));
  CHECK(conformal_leq(iv({0, 0}), iv({5, -1})));
  CHECK_FALSE(conformal_leq(iv({3}), iv({2})));
  CHECK_THROWS_AS(conformal_leq(iv({1}), iv({1, 1})), DimensionError);
}

TEST_CASE("Graver bases of small matrices") {
  CHECK(graver_basis(IntMatrix::from_rows({{1, -1}})).elements == std::vector<IntVec>{iv({-1, -1}), iv({1, 1})});
  const auto g3 = graver_basis(IntMatrix::from_rows({{1, 1, -1}})).elements;
  CHECK(as_set(g3) == std::set<IntVec>{iv({1, 0, 1}), iv({-1, 0, -1}), iv({0, 1, 1}), iv({0, -1, -1}),
                                       iv({1, -1, 0}), iv({-1, 1, 0})});
  CHECK(std::is_sorted(g3.begin(), g3.end()));
  const auto k22 = graver_basis(table2x2().a2()).elements;
  CHECK(as_set(k22) == std::set<IntVec>{iv({1, -1, -1, 1}), iv({-1, 1, 1, -1})});
  CHECK(graver_basis(IntMatrix::identity(3)).elements.empty());
}

TEST_CASE("Graver basis invariants and brute-force agreement") {
  const std::vector<IntMatrix> mats{IntMatrix::from_rows({{1, 2, -3}}), IntMatrix::from_rows({{2, -1, 0, 3}}),
                                    IntMatrix::from_rows({{1, 1, 1, -1}, {0, 1, -2, 1}}),
                                    IntMatrix::from_rows({{3, -2, 1}})};
  for (const auto& b : mats) {
    const auto g = graver_basis(b).elements;
    const std::set<IntVec> s = as_set(g);
    long long radius = 0;
    for (const auto& e : g) {
      CHECK(is_zero(matvec(b, e)));
      CHECK_FALSE(is_zero(e));
      CHECK(s.count(scale(Int(-1), e)) == 1);
      for (const auto& v : e) radius = std::max(radius, static_cast<long long>(abs(v)));
    }
    for (const auto& x : g)
      for (const auto& y : g)
        if (x != y) CHECK_FALSE(conformal_leq(x, y));
    CHECK(as_set(oracle::bf_graver(b, 2 * radius)) == s);
  }
}

TEST_CASE("Graver element cap") {
  GraverOptions tiny;
  tiny.element_cap = 3;
  CHECK_THROWS_AS(graver_basis(IntMatrix::from_rows({{1, 1, -1}}), tiny), BudgetError);
}

TEST_CASE("Graver complexity") {
  CHECK(graver_complexity(Bimatrix(IntMatrix::from_rows({{1, 1}}), IntMatrix::identity(2))) == 0);
  CHECK(graver_complexity(table2x2()) == 2);
  CHECK(graver_complexity(small_bimatrix()) == 2);
}

TEST_CASE("lifting structure at g + 1") {
  for (const Bimatrix& a : {table2x2(), small_bimatrix()}) {
    const std::size_t g = graver_complexity(a);
    CHECK(as_set(graver_basis(nfold_product(a, g + 1)).elements) == liftings(a, g, g + 1));
  }
}

TEST_CASE("templates") {
  SUBCASE("2x2 tables: one swap pair up to sign") {
    const GraverTemplates t = graver_templates(table2x2());
    CHECK(t.complexity == 2);
    CHECK(t.complete);
    // The pair is its own negation as a multiset.
    REQUIRE(t.templates.size() == 1);
    CHECK(t.templates[0].bricks == std::vector<IntVec>{iv({-1, 1, 1, -1}), iv({1, -1, -1, 1})});
  }
  SUBCASE("trivial kernel") {
    const GraverTemplates t = graver_templates(Bimatrix(IntMatrix::from_rows({{1, 1}}), IntMatrix::identity(2)));
    CHECK(t.templates.empty());
  }
  SUBCASE("A1 = [1 1], A2 = [1 -1]") {
    const Bimatrix a = small_bimatrix();
    const GraverTemplates t = graver_templates(a);
    std::set<Template> expect;
    for (const auto& e : graver_basis(nfold_product(a, 2)).elements) expect.insert(canonical_template(e, 2));
    CHECK(std::set<Template>(t.templates.begin(), t.templates.end()) == expect);
    CHECK(std::is_sorted(t.templates.begin(), t.templates.end()));
    for (const auto& tp : t.templates) {
      Template neg;
      for (const auto& b : tp.bricks) neg.bricks.push_back(scale(Int(-1), b));
      std::sort(neg.bricks.begin(), neg.bricks.end());
      CHECK(std::binary_search(t.templates.begin(), t.templates.end(), neg));
    }
  }
}

TEST_CASE("Lifting places template bricks") {
  Template single{{iv({1, -1})}};
  Lifting l1(single, {2}, 3);
  CHECK(l1.brick(1) == iv({0, 0}));
  CHECK(l1.brick(2) == iv({1, -1}));
  CHECK(l1.materialize() == iv({0, 0, 1, -1, 0, 0}));
  Template swap{{iv({-1, 1, 1, -1}), iv({1, -1, -1, 1})}};
  Lifting l2(swap, {1, 2}, 2);
  CHECK(l2.materialize() == iv({-1, 1, 1, -1, 1, -1, -1, 1}));
  Lifting l4(swap, {1, 4}, 4);
  CHECK(!is_zero(l4.brick(1)));
  CHECK(is_zero(l4.brick(2)));
  CHECK(is_zero(l4.brick(3)));
  CHECK(!is_zero(l4.brick(4)));
  CHECK_THROWS(Lifting(swap, {2, 5}, 4));
  CHECK_THROWS(Lifting(swap, {3, 3}, 4));
}

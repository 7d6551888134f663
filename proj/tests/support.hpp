#pragma once

// Instance builders shared by the unit tests and the acceptance binary.

#include <random>
#include <vector>

#include "hugenfold/oracle.hpp"
#include "hugenfold/tables.hpp"

namespace testsupport {

using namespace hugenfold;

inline IntVec iv(std::initializer_list<long long> v) { return to_intvec(v); }

inline IntVec ivec(const std::vector<long long>& v) {
  IntVec out;
  for (long long x : v) out.emplace_back(x);
  return out;
}

/// Table with explicit per-layer margins; equal layers are grouped into one type.
inline HugeTableInstance table_of(std::size_t l, std::size_t m, const IntMatrix& g,
                                  const std::vector<std::pair<IntVec, IntVec>>& layers) {
  HugeTableInstance t;
  t.l = l;
  t.m = m;
  t.line_sums = g;
  for (const auto& [rows, cols] : layers) {
    bool merged = false;
    for (auto& ty : t.types) {
      if (ty.rows == rows && ty.cols == cols) {
        ty.count += 1;
        merged = true;
        break;
      }
    }
    if (!merged) t.types.push_back({rows, cols, Int(1)});
  }
  return t;
}

/// Oracle query for the same table, one layer per brick.
inline oracle::TableSearch search_of(const HugeTableInstance& t) {
  oracle::TableSearch s;
  s.l = t.l;
  s.m = t.m;
  s.line_sums = t.line_sums;
  for (const auto& ty : t.types) {
    for (Int c = 0; c < ty.count; ++c) {
      s.row_sums.push_back(ty.rows);
      s.col_sums.push_back(ty.cols);
    }
  }
  return s;
}

/// The 2x2x4 instance with all line-sums 2 and unit layer margins.
inline HugeTableInstance symmetric_2x2x4() {
  HugeTableInstance t;
  t.l = 2;
  t.m = 2;
  t.line_sums = IntMatrix::from_rows({{2, 2}, {2, 2}});
  t.types.push_back({iv({1, 1}), iv({1, 1}), Int(4)});
  return t;
}

/// One layer forced to cell (1,1) while g asks for cell (2,2).
inline HugeTableInstance contradiction_2x2x1() {
  HugeTableInstance t;
  t.l = 2;
  t.m = 2;
  t.line_sums = IntMatrix::from_rows({{0, 0}, {0, 1}});
  t.types.push_back({iv({1, 0}), iv({1, 0}), Int(1)});
  return t;
}

inline IntVec random_margin(std::mt19937_64& rng, std::size_t len, long long total) {
  IntVec out(len, Int(0));
  for (long long u = 0; u < total; ++u) out[rng() % len] += 1;
  return out;
}

/// Random small n-fold instance with finite boxes [0, ub]; w, A1, A2 entries
/// in [-2, 2]. Right-hand sides come from a random planted point about half
/// the time, so both feasible and infeasible instances appear.
struct NFoldShape {
  std::size_t r = 1, s = 1, d = 2, t = 1;
  long long n_max = 3;
  long long ub = 3;
};

inline HugeNFoldInstance random_nfold(std::mt19937_64& rng, const NFoldShape& sh) {
  auto pick = [&](long long lo, long long hi) { return lo + static_cast<long long>(rng() % (hi - lo + 1)); };
  IntMatrix a1(sh.r, sh.d), a2(sh.s, sh.d);
  for (std::size_t i = 0; i < sh.r; ++i)
    for (std::size_t j = 0; j < sh.d; ++j) a1(i, j) = pick(-2, 2);
  for (std::size_t i = 0; i < sh.s; ++i)
    for (std::size_t j = 0; j < sh.d; ++j) a2(i, j) = pick(-2, 2);
  const bool planted = rng() % 2 == 0;
  std::vector<BrickType> types;
  IntVec total = zeros(sh.d);
  for (std::size_t k = 0; k < sh.t; ++k) {
    BrickType ty;
    for (std::size_t j = 0; j < sh.d; ++j) {
      ty.w.emplace_back(pick(-2, 2));
      ty.lower.emplace_back(0);
      ty.upper.emplace_back(pick(1, sh.ub));
    }
    ty.count = pick(1, sh.n_max);
    IntVec z(sh.d);
    for (std::size_t j = 0; j < sh.d; ++j) z[j] = pick(0, static_cast<long long>(ty.upper[j].value()));
    ty.b = matvec(a2, z);
    if (planted) {
      total = add(total, scale(ty.count, z));
    } else {
      for (std::size_t c = 0; c < static_cast<std::size_t>(ty.count); ++c) {
        IntVec y(sh.d);
        for (std::size_t j = 0; j < sh.d; ++j) y[j] = pick(0, static_cast<long long>(ty.upper[j].value()));
        total = add(total, y);
      }
    }
    types.push_back(std::move(ty));
  }
  IntVec b0 = matvec(a1, total);
  return HugeNFoldInstance(Bimatrix(std::move(a1), std::move(a2)), std::move(types), std::move(b0));
}

/// Compact presentation from explicit bricks listed in type order.
inline CompactPresentation compact_of(const HugeNFoldInstance& inst, const std::vector<IntVec>& bricks) {
  CompactPresentation cp;
  std::size_t at = 0;
  for (const auto& ty : inst.types()) {
    BrickMap m;
    for (Int c = 0; c < ty.count; ++c) m[bricks[at++]] += 1;
    cp.types.push_back(std::move(m));
  }
  return cp;
}

/// 3x3 table with t = 3 types. Each type has `shapes` planted layers that
/// share its margins (related by 2x2 swaps). Type counts split n as n/3,
/// n/3 and the rest; inside a type, layer q takes rest/(q+2) of what remains.
/// The same seed gives the same margins and proportions for every n.
inline HugeTableInstance planted_3x3(std::uint64_t seed, const Int& n, int shapes = 3) {
  std::mt19937_64 rng(seed);
  HugeTableInstance t;
  t.l = t.m = 3;
  t.line_sums = IntMatrix(3, 3);
  for (int k = 0; k < 3; ++k) {
    IntVec base(9);
    for (auto& v : base) v = static_cast<long long>(rng() % 3);
    std::vector<IntVec> layers{base};
    for (int q = 1; q < shapes; ++q) {
      IntVec z = layers.back();
      for (int it = 0; it < 5; ++it) {
        const std::size_t i1 = rng() % 3, i2 = rng() % 3, j1 = rng() % 3, j2 = rng() % 3;
        if (i1 == i2 || j1 == j2) continue;
        if (z[i1 + 3 * j2] > 0 && z[i2 + 3 * j1] > 0) {
          z[i1 + 3 * j1] += 1;
          z[i2 + 3 * j2] += 1;
          z[i1 + 3 * j2] -= 1;
          z[i2 + 3 * j1] -= 1;
        }
      }
      layers.push_back(z);
    }
    TableType ty{zeros(3), zeros(3), k < 2 ? Int(n / 3) : Int(n - 2 * (n / 3))};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        ty.rows[i] += base[i + 3 * j];
        ty.cols[j] += base[i + 3 * j];
      }
    Int rest = ty.count;
    for (int q = 0; q < shapes; ++q) {
      const Int mult = q + 1 == shapes ? rest : Int(rest / (q + 2));
      rest -= mult;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) t.line_sums(i, j) += mult * layers[static_cast<std::size_t>(q)][i + 3 * j];
    }
    t.types.push_back(std::move(ty));
  }
  return t;
}

}  // namespace testsupport

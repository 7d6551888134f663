#pragma once

// Brute-force reference solvers. They depend on the core types only and
// share no code with the solvers they are used to check.

#include <cstdint>
#include <vector>

#include "hugenfold/core.hpp"
#include "hugenfold/instance.hpp"

namespace hugenfold::oracle {

inline constexpr std::uint64_t kDefaultBudget = 100'000'000;

/// ⊑-minimal nonzero kernel elements of `b` inside [-radius, radius]^n,
/// sorted lexicographically. Only complete inside the box.
std::vector<IntVec> bf_graver(const IntMatrix& b, long long radius, std::uint64_t budget = kDefaultBudget);

/// Layers are l*m vectors indexed column-major: (i, j) -> i + l*j.
using Table = std::vector<IntVec>;

enum class TableScan {
  LayerMajor,  // fill one layer after another, cell by cell
  LineMajor,   // split each line-sum g_ij over the layers
};

struct TableSearch {
  std::size_t l = 0;
  std::size_t m = 0;
  IntMatrix line_sums;             // l x m
  std::vector<IntVec> row_sums;    // per layer, length l
  std::vector<IntVec> col_sums;    // per layer, length m
};

struct TableResult {
  bool feasible = false;
  std::vector<Table> tables;  // every table, or the first one only
};

TableResult bf_tables(const TableSearch& search, bool first_only, TableScan order = TableScan::LayerMajor,
                      std::uint64_t budget = kDefaultBudget);

struct NFoldResult {
  bool feasible = false;
  Int optimum = 0;
  /// Explicit bricks in type order; lexicographically least among optima.
  std::vector<IntVec> bricks;
};

/// Exhaustive search over explicit bricks. Needs finite bounds and a
/// small total brick count.
NFoldResult bf_nfold(const HugeNFoldInstance& inst, bool reverse_order = false, std::uint64_t budget = kDefaultBudget);

}  // namespace hugenfold::oracle

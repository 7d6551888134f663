#pragma once

// Optimization through explicit brick sets: enumerate every legal brick of
// each type, then search nonnegative integer multiplicities that hit the
// counts, b0 and an objective window, narrowing the window by bisection.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hugenfold/instance.hpp"

namespace hugenfold {

struct BrickSet {
  std::size_t type = 0;
  std::vector<IntVec> elements;  // lexicographic
};

struct ConeOptions {
  std::uint64_t node_budget = 10'000'000;
  std::size_t brick_cap = 1'000'000;
};

/// All z with A2 z = b and lower <= z <= upper. Throws PreconditionError when
/// the set is infinite and BudgetError past `cap` elements.
BrickSet enumerate_bricks(const IntMatrix& a2, const IntVec& b, const ExtVec& lower, const ExtVec& upper,
                          std::size_t cap = 1'000'000);

/// (min, max) of w.z over the set. Throws PreconditionError when empty.
std::pair<Int, Int> brick_extremes(const BrickSet& s, const IntVec& w);

struct ConeTarget {
  std::vector<Int> counts;
  IntVec b0;
  Int lower;
  Int upper;
};

struct ConeStats {
  std::uint64_t nodes = 0;
  std::size_t membership_calls = 0;
};

/// Multiplicities lambda^k over S^k with sum n_k per type, A1 * sum = b0 and
/// objective inside [lower, upper]; nullopt when none exist. At most 2^d
/// bricks per type are used. Throws BudgetError past the node budget.
std::optional<std::vector<BrickMap>> cone_membership(const IntMatrix& a1, const std::vector<BrickSet>& sets,
                                                     const ConeTarget& target, const std::vector<IntVec>& w,
                                                     const ConeOptions& options = {}, ConeStats* stats = nullptr);

/// Exact optimum by bisection on the objective window; nullopt when the
/// instance is infeasible. The result is support-reduced.
std::optional<CompactPresentation> solve_cone(const HugeNFoldInstance& inst, const ConeOptions& options = {},
                                              ConeStats* stats = nullptr);

}  // namespace hugenfold

#pragma once

// Checking, summarizing, expanding and shrinking compact presentations.

#include <cstddef>
#include <string>
#include <vector>

#include "hugenfold/instance.hpp"

namespace hugenfold {

struct PresentationReport {
  bool structural_ok = false;  // one map per type, positive multiplicities, brick width d, nonempty support
  bool bricks_ok = false;      // A2 z = b^k and l^k <= z <= u^k for every support brick
  bool counts_ok = false;      // multiplicities of type k sum to n_k
  bool aggregate_ok = false;   // A1 * (sum of all bricks) = b0
  std::vector<std::string> issues;

  bool ok() const { return structural_ok && bricks_ok && counts_ok && aggregate_ok; }
};

/// Feasibility check. Never throws on bad presentations; every failure is
/// reported. Cost is polynomial in support size and bit length only.
PresentationReport check_presentation(const HugeNFoldInstance& inst, const CompactPresentation& cp);

struct Aggregate {
  std::vector<IntVec> per_type;  // sum of lambda_z * z per type
  IntVec total;
};

/// Throws PreconditionError on an empty support or a malformed brick.
Aggregate aggregate(const CompactPresentation& cp, std::size_t d);
Int cost(const HugeNFoldInstance& inst, const CompactPresentation& cp);
/// Sum of lambda_z over type k.
Int type_count(const BrickMap& m);

inline constexpr std::size_t kMaxExpandedBricks = 100'000;

/// Explicit bricks: types in order, bricks of a type lexicographically.
/// Throws BudgetError when n exceeds max_bricks.
std::vector<IntVec> expand(const HugeNFoldInstance& inst, const CompactPresentation& cp,
                           std::size_t max_bricks = kMaxExpandedBricks);

struct ReduceStats {
  std::size_t merges = 0;
};

/// Replaces same-parity pairs by their midpoint until each type has at most
/// one brick per parity class (so at most 2^d bricks). Counts, aggregates
/// and cost are preserved exactly. Requires bricks_ok and structural_ok.
CompactPresentation reduce_support(const HugeNFoldInstance& inst, const CompactPresentation& cp,
                                   ReduceStats* stats = nullptr);

/// Sum of lambda_z * |z|^2 over all types; strictly drops on every merge.
Int support_potential(const CompactPresentation& cp);

}  // namespace hugenfold

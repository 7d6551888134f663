#pragma once

// End-to-end optimization of a general huge n-fold instance.

#include <optional>
#include <string>

#include "hugenfold/tables.hpp"

namespace hugenfold {

enum class NFoldStatus { Optimal, Infeasible };

struct NFoldVerdict {
  NFoldStatus status = NFoldStatus::Infeasible;
  std::optional<CompactPresentation> solution;
  std::optional<InfeasibilityCertificate> certificate;  // augment strategy only
  Int objective = 0;
  std::string method;
  std::size_t rounds = 0;
  /// The solution is optimal with respect to a complete template set or an
  /// exhaustive cone search.
  bool proven_optimal = false;
};

/// Augment: a feasible start (given, or from the slack program), then
/// Graver-best augmentation with the full templates of A. Cone: bisection
/// over explicit brick sets. Throws UnboundedError and BudgetError.
NFoldVerdict solve_nfold(const HugeNFoldInstance& inst, const SolveOptions& options = {},
                         const std::optional<CompactPresentation>& start = std::nullopt);

}  // namespace hugenfold

#pragma once

// Graver-best augmentation over compact presentations.
//
// A step takes a template h (nonzero bricks h^1..h^p), maps each h^i to a
// support brick z^i of some type k(i) without exceeding multiplicities,
// and replaces one copy of z^i by z^i + alpha*h^i.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hugenfold/graver.hpp"
#include "hugenfold/instance.hpp"

namespace hugenfold {

struct SlotRef {
  std::size_t type = 0;
  IntVec brick;
  friend auto operator<=>(const SlotRef&, const SlotRef&) = default;
};

/// phi[i] is the support brick receiving template brick i.
using LiftingMap = std::vector<SlotRef>;

struct AugmentStep {
  std::size_t template_index = 0;  // position in the template list, or 0 for ad hoc steps
  Template h;
  LiftingMap phi;
  Int alpha = 0;
  Int improvement = 0;  // alpha * sum_i w^{k(i)} h^i, negative

  // Batching: the step is performed `repeat` times. Per template brick,
  // either `repeat` copies of z^i each move by alpha*h^i, or (scaled) one
  // copy moves by repeat*alpha*h^i.
  Int repeat = 1;
  std::vector<bool> scaled;

  Int total_improvement() const { return repeat * improvement; }
};

/// Largest alpha for (h, phi). nullopt when the direction does not improve
/// or alpha = 1 already leaves the bounds. Throws PreconditionError when phi
/// exceeds a multiplicity and UnboundedError when no bound limits alpha.
std::optional<AugmentStep> max_step(const HugeNFoldInstance& inst, const CompactPresentation& cp, const Template& h,
                                    const LiftingMap& phi);

/// Applies a step (with its batching). Throws InternalError on a stale step.
CompactPresentation apply_step(const CompactPresentation& cp, const AugmentStep& step);

/// Sets `repeat` to the largest count for which the batched step stays
/// feasible, choosing replicate or scale per support brick.
AugmentStep batch_step(const HugeNFoldInstance& inst, const CompactPresentation& cp, AugmentStep step);

/// Templates that suffice for this instance: those of A^(min(g, n)). With
/// fewer bricks than g, padding an element of G(A^(n)) with zero bricks
/// gives an element of G(A^(g)), and longer templates cannot be placed.
GraverTemplates instance_templates(const HugeNFoldInstance& inst, const GraverOptions& options = {});

struct AugmentOptions {
  std::uint64_t phi_budget = 10'000'000;  // (template, phi) pairs per round
  int threads = 1;
};

/// Most negative improvement over all templates and lifting maps; ties go
/// to the first pair in canonical order. Uses OpenMP when threads > 1.
std::optional<AugmentStep> best_augmentation(const HugeNFoldInstance& inst, const CompactPresentation& cp,
                                             const GraverTemplates& templates, const AugmentOptions& options = {});

/// Single-threaded reference.
std::optional<AugmentStep> best_augmentation_serial(const HugeNFoldInstance& inst, const CompactPresentation& cp,
                                                    const GraverTemplates& templates,
                                                    const AugmentOptions& options = {});

/// OpenMP evaluation with the same selection as the serial reference.
std::optional<AugmentStep> best_augmentation_parallel(const HugeNFoldInstance& inst, const CompactPresentation& cp,
                                                      const GraverTemplates& templates,
                                                      const AugmentOptions& options = {});

struct OptimizeOptions {
  AugmentOptions augment;
  std::size_t max_rounds = 100'000;
  bool batch = true;
  bool reduce = true;
  /// Called after each applied step with the presentation it was applied to.
  std::function<void(const CompactPresentation&, const AugmentStep&)> on_step;
};

struct OptimizeResult {
  CompactPresentation cp;
  std::size_t rounds = 0;
  Int total_improvement = 0;
  /// No improving step remains and the template set is complete.
  bool proven_optimal = false;
};

/// Augments until no template improves. Requires a feasible cp0.
OptimizeResult optimize(const HugeNFoldInstance& inst, const CompactPresentation& cp0,
                        const GraverTemplates& templates, const OptimizeOptions& options = {});

}  // namespace hugenfold

#pragma once

// Conformal order, Graver bases, Graver complexity of a bimatrix and the
// brick templates from which every Graver element of a large n-fold
// product is obtained by lifting.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hugenfold/core.hpp"

namespace hugenfold {

/// x ⊑ y: every coordinate of x has the sign of y and no larger magnitude.
bool conformal_leq(std::span<const Int> x, std::span<const Int> y);

struct GraverOptions {
  std::size_t element_cap = 1'000'000;
};

struct GraverBasis {
  IntMatrix matrix;
  /// Lexicographically sorted, closed under negation.
  std::vector<IntVec> elements;
};

/// Lattice basis of {x in Z^n : Bx = 0}, rows in echelon form.
std::vector<IntVec> integer_kernel_basis(const IntMatrix& b);

/// Minimal nonzero kernel elements of `b` under ⊑. Throws BudgetError past
/// options.element_cap elements.
GraverBasis graver_basis(const IntMatrix& b, const GraverOptions& options = {});

/// Threshold g such that G(A^(n)) is made of n-liftings of G(A^(g)) for
/// all n >= g.
std::size_t graver_complexity(const Bimatrix& a, const GraverOptions& options = {});

/// A Graver element of A^(g) up to brick order: its nonzero bricks, sorted.
struct Template {
  std::vector<IntVec> bricks;
  friend auto operator<=>(const Template&, const Template&) = default;
};

struct GraverTemplates {
  Bimatrix bimatrix;
  std::size_t complexity = 0;
  /// Sorted; closed under negation.
  std::vector<Template> templates;
  /// True when `templates` is all of G(A^(g)); only then does the absence
  /// of an improving step prove optimality.
  bool complete = true;
};

GraverTemplates graver_templates(const Bimatrix& a, const GraverOptions& options = {});
/// Templates from a known complexity, skipping the complexity computation.
GraverTemplates graver_templates(const Bimatrix& a, std::size_t complexity, const GraverOptions& options = {});

/// Canonical multiset-of-nonzero-bricks form of an element of A^(n).
Template canonical_template(std::span<const Int> element, std::size_t brick_width);

/// Positions are 1-based and strictly increasing, one per template brick.
/// Yields brick `i` of the n-brick lifted vector without materializing it.
class Lifting {
public:
  Lifting(const Template& t, std::vector<std::size_t> positions, std::size_t n);

  std::size_t size() const { return n_; }
  /// Brick at 1-based position p (zero brick if unassigned).
  IntVec brick(std::size_t p) const;
  /// Materialized concatenation; only sensible for small n.
  IntVec materialize() const;

private:
  const Template* template_;
  std::vector<std::size_t> positions_;
  std::size_t n_;
  std::size_t width_;
};

}  // namespace hugenfold

#include "hugenfold/conesolver.hpp"

#include <algorithm>

#include "hugenfold/graver.hpp"
#include "hugenfold/presentation.hpp"

namespace hugenfold {

namespace {

Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

Int ceil_div(const Int& a, const Int& b) { return -floor_div(-a, b); }

using Bound = std::optional<Int>;

// Tightens lo/hi from the equations row by row until nothing changes.
void propagate(const IntMatrix& a2, const IntVec& b, std::vector<Bound>& lo, std::vector<Bound>& hi) {
  const std::size_t d = a2.cols();
  for (std::size_t pass = 0; pass < 64 * (d + 1); ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < a2.rows(); ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const Int& aij = a2(i, j);
        if (aij == 0) continue;
        // rest = sum over k != j of a_ik x_k lies in [rmin, rmax]
        Bound rmin = Int(0), rmax = Int(0);
        for (std::size_t k = 0; k < d; ++k) {
          if (k == j || a2(i, k) == 0) continue;
          const Int& a = a2(i, k);
          const Bound& small = a > 0 ? lo[k] : hi[k];
          const Bound& large = a > 0 ? hi[k] : lo[k];
          if (rmin) rmin = small ? Bound(*rmin + a * *small) : std::nullopt;
          if (rmax) rmax = large ? Bound(*rmax + a * *large) : std::nullopt;
        }
        // a_ij x_j = b_i - rest
        Bound top = rmin ? Bound(b[i] - *rmin) : std::nullopt;
        Bound bottom = rmax ? Bound(b[i] - *rmax) : std::nullopt;
        Bound new_hi, new_lo;
        if (aij > 0) {
          if (top) new_hi = floor_div(*top, aij);
          if (bottom) new_lo = ceil_div(*bottom, aij);
        } else {
          if (bottom) new_hi = floor_div(*bottom, aij);
          if (top) new_lo = ceil_div(*top, aij);
        }
        if (new_hi && (!hi[j] || *new_hi < *hi[j])) {
          hi[j] = new_hi;
          changed = true;
        }
        if (new_lo && (!lo[j] || *new_lo > *lo[j])) {
          lo[j] = new_lo;
          changed = true;
        }
      }
    }
    if (!changed) return;
  }
}

}  // namespace

BrickSet enumerate_bricks(const IntMatrix& a2, const IntVec& b, const ExtVec& lower, const ExtVec& upper,
                          std::size_t cap) {
  const std::size_t d = a2.cols(), s = a2.rows();
  if (b.size() != s || lower.size() != d || upper.size() != d) throw DimensionError("enumerate_bricks: shape mismatch");

  std::vector<Bound> lo(d), hi(d);
  bool all_finite = true;
  for (std::size_t j = 0; j < d; ++j) {
    if (lower[j].finite()) lo[j] = lower[j].value();
    if (upper[j].finite()) hi[j] = upper[j].value();
    all_finite = all_finite && lo[j] && hi[j];
  }
  if (!all_finite) {
    // A recession direction exists iff some Graver element fits the sign
    // pattern allowed by the infinite bounds.
    const auto gb = graver_basis(a2);
    for (const auto& g : gb.elements) {
      bool fits = true;
      for (std::size_t j = 0; j < d && fits; ++j) {
        if (g[j] > 0 && hi[j]) fits = false;
        if (g[j] < 0 && lo[j]) fits = false;
      }
      if (fits) throw PreconditionError("brick set is infinite (or empty): direction " + to_string(g) + " fits the bounds");
    }
  }
  propagate(a2, b, lo, hi);
  for (std::size_t j = 0; j < d; ++j) {
    if (!lo[j] || !hi[j]) throw BudgetError("enumerate_bricks: could not derive finite coordinate bounds");
    if (*lo[j] > *hi[j]) return {};
  }

  // suffix_min[i][j] / suffix_max[i][j]: range of sum_{k >= j} a_ik x_k.
  std::vector<IntVec> suffix_min(s, IntVec(d + 1)), suffix_max(s, IntVec(d + 1));
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = d; j-- > 0;) {
      Int p = a2(i, j) * *lo[j], q = a2(i, j) * *hi[j];
      suffix_min[i][j] = suffix_min[i][j + 1] + std::min(p, q);
      suffix_max[i][j] = suffix_max[i][j + 1] + std::max(p, q);
    }

  BrickSet out;
  IntVec z(d);
  IntVec partial(s);
  std::uint64_t nodes = 0;
  const std::uint64_t node_cap = 100'000'000;
  auto visit = [&](auto&& self, std::size_t j) -> void {
    if (++nodes > node_cap) throw BudgetError("enumerate_bricks: node budget exceeded");
    for (std::size_t i = 0; i < s; ++i) {
      if (partial[i] + suffix_min[i][j] > b[i] || partial[i] + suffix_max[i][j] < b[i]) return;
    }
    if (j == d) {
      if (out.elements.size() == cap) throw BudgetError("enumerate_bricks: more than " + std::to_string(cap) + " bricks");
      out.elements.push_back(z);
      return;
    }
    for (Int v = *lo[j]; v <= *hi[j]; ++v) {
      z[j] = v;
      for (std::size_t i = 0; i < s; ++i) partial[i] += a2(i, j) * v;
      self(self, j + 1);
      for (std::size_t i = 0; i < s; ++i) partial[i] -= a2(i, j) * v;
    }
    z[j] = 0;
  };
  visit(visit, 0);
  return out;
}

std::pair<Int, Int> brick_extremes(const BrickSet& s, const IntVec& w) {
  if (s.elements.empty()) throw PreconditionError("brick set of type " + std::to_string(s.type + 1) + " is empty");
  Int lo = dot(w, s.elements.front()), hi = lo;
  for (const auto& z : s.elements) {
    Int v = dot(w, z);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

namespace {

class ConeSearch {
public:
  ConeSearch(const IntMatrix& a1, const std::vector<BrickSet>& sets, const ConeTarget& target,
             const std::vector<IntVec>& w, const ConeOptions& options, ConeStats* stats)
      : sets_(sets), target_(target), options_(options), stats_(stats) {
    t_ = sets.size();
    r_ = a1.rows();
    dims_ = r_ + 1;  // A1 rows, then the objective
    vals_.resize(t_);
    suffix_min_.resize(t_);
    suffix_max_.resize(t_);
    for (std::size_t k = 0; k < t_; ++k) {
      const auto& el = sets[k].elements;
      for (const auto& z : el) {
        IntVec v = matvec(a1, z);
        v.push_back(dot(w[k], z));
        vals_[k].push_back(std::move(v));
      }
      const std::size_t m = el.size();
      suffix_min_[k].assign(m + 1, IntVec(dims_));
      suffix_max_[k].assign(m + 1, IntVec(dims_));
      for (std::size_t idx = m; idx-- > 0;)
        for (std::size_t i = 0; i < dims_; ++i) {
          const Int& v = vals_[k][idx][i];
          suffix_min_[k][idx][i] = idx + 1 == m ? v : std::min(v, suffix_min_[k][idx + 1][i]);
          suffix_max_[k][idx][i] = idx + 1 == m ? v : std::max(v, suffix_max_[k][idx + 1][i]);
        }
    }
    // later_min_[k]: sum over types k' >= k of n_k' * min value.
    later_min_.assign(t_ + 1, IntVec(dims_));
    later_max_.assign(t_ + 1, IntVec(dims_));
    for (std::size_t k = t_; k-- > 0;)
      for (std::size_t i = 0; i < dims_; ++i) {
        later_min_[k][i] = later_min_[k + 1][i];
        later_max_[k][i] = later_max_[k + 1][i];
        if (!sets[k].elements.empty()) {
          later_min_[k][i] += target.counts[k] * suffix_min_[k][0][i];
          later_max_[k][i] += target.counts[k] * suffix_max_[k][0][i];
        }
      }
    support_cap_ = a1.cols() >= 62 ? ~std::size_t{0} : (std::size_t{1} << a1.cols());
  }

  std::optional<std::vector<BrickMap>> run() {
    for (std::size_t k = 0; k < t_; ++k)
      if (sets_[k].elements.empty() && target_.counts[k] > 0) return std::nullopt;
    lo_.assign(dims_, Int(0));
    hi_.assign(dims_, Int(0));
    for (std::size_t i = 0; i < r_; ++i) lo_[i] = hi_[i] = target_.b0[i];
    lo_[r_] = target_.lower;
    hi_[r_] = target_.upper;
    chosen_.assign(t_, {});
    if (visit(0, 0, t_ > 0 ? target_.counts[0] : Int(0), 0)) return chosen_;
    return std::nullopt;
  }

private:
  // lo_/hi_ hold the window still to be filled by the undecided bricks.
  bool visit(std::size_t k, std::size_t idx, const Int& remaining, std::size_t used) {
    if (k == t_) {
      for (std::size_t i = 0; i < dims_; ++i)
        if (lo_[i] > 0 || hi_[i] < 0) return false;
      return true;
    }
    if (remaining == 0) return visit(k + 1, 0, k + 1 < t_ ? target_.counts[k + 1] : Int(0), 0);
    const auto& el = sets_[k].elements;
    if (idx == el.size()) return false;

    // Feasible multiplicities for brick idx from interval reasoning on
    // every row: idx takes lambda, later bricks of this type share the
    // rest, later types contribute their full range.
    Int lam_lo = 0, lam_hi = remaining;
    const bool last = idx + 1 == el.size();
    if (last) lam_lo = remaining;
    for (std::size_t i = 0; i < dims_ && lam_lo <= lam_hi; ++i) {
      const Int& a = vals_[k][idx][i];
      const Int mn = last ? a : suffix_min_[k][idx + 1][i];
      const Int mx = last ? a : suffix_max_[k][idx + 1][i];
      const Int& p = later_min_[k + 1][i];
      const Int& q = later_max_[k + 1][i];
      // lambda (a - mn) <= hi - remaining*mn - p
      restrict_upper(a - mn, hi_[i] - remaining * mn - p, lam_lo, lam_hi);
      // lambda (a - mx) >= lo - remaining*mx - q
      restrict_lower(a - mx, lo_[i] - remaining * mx - q, lam_lo, lam_hi);
    }
    if (used >= support_cap_) lam_hi = std::min(lam_hi, Int(0));
    for (Int lam = lam_hi; lam >= lam_lo; --lam) {
      tick();
      if (lam > 0) {
        shift(vals_[k][idx], lam, -1);
        chosen_[k][el[idx]] = lam;
      }
      bool ok = visit(k, idx + 1, remaining - lam, used + (lam > 0 ? 1 : 0));
      if (ok) return true;
      if (lam > 0) {
        shift(vals_[k][idx], lam, +1);
        chosen_[k].erase(el[idx]);
      }
    }
    return false;
  }

  static void restrict_upper(const Int& coef, const Int& rhs, Int& lo, Int& hi) {
    if (coef > 0) hi = std::min(hi, floor_div(rhs, coef));
    else if (coef < 0) lo = std::max(lo, ceil_div(rhs, coef));
    else if (rhs < 0) hi = lo - 1;
  }
  static void restrict_lower(const Int& coef, const Int& rhs, Int& lo, Int& hi) {
    if (coef > 0) lo = std::max(lo, ceil_div(rhs, coef));
    else if (coef < 0) hi = std::min(hi, floor_div(rhs, coef));
    else if (rhs > 0) hi = lo - 1;
  }

  void shift(const IntVec& v, const Int& lam, int sign) {
    for (std::size_t i = 0; i < dims_; ++i) {
      Int delta = lam * v[i];
      if (sign < 0) {
        lo_[i] -= delta;
        hi_[i] -= delta;
      } else {
        lo_[i] += delta;
        hi_[i] += delta;
      }
    }
  }

  void tick() {
    if (stats_) ++stats_->nodes;
    if (++nodes_ > options_.node_budget) {
      throw BudgetError("cone membership: node budget of " + std::to_string(options_.node_budget) + " exceeded");
    }
  }

  const std::vector<BrickSet>& sets_;
  const ConeTarget& target_;
  const ConeOptions& options_;
  ConeStats* stats_;
  std::size_t t_ = 0, r_ = 0, dims_ = 0, support_cap_ = 0;
  std::vector<std::vector<IntVec>> vals_;
  std::vector<std::vector<IntVec>> suffix_min_, suffix_max_;
  std::vector<IntVec> later_min_, later_max_;
  IntVec lo_, hi_;
  std::vector<BrickMap> chosen_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

std::optional<std::vector<BrickMap>> cone_membership(const IntMatrix& a1, const std::vector<BrickSet>& sets,
                                                     const ConeTarget& target, const std::vector<IntVec>& w,
                                                     const ConeOptions& options, ConeStats* stats) {
  if (target.counts.size() != sets.size() || w.size() != sets.size()) {
    throw DimensionError("cone_membership: counts, costs and brick sets disagree on the number of types");
  }
  if (target.b0.size() != a1.rows()) throw DimensionError("cone_membership: b0 length differs from A1 rows");
  if (target.lower > target.upper) throw PreconditionError("cone_membership: empty objective window");
  if (stats) ++stats->membership_calls;
  ConeSearch search(a1, sets, target, w, options, stats);
  return search.run();
}

std::optional<CompactPresentation> solve_cone(const HugeNFoldInstance& inst, const ConeOptions& options,
                                              ConeStats* stats) {
  const Bimatrix& a = inst.bimatrix();
  std::vector<BrickSet> sets;
  std::vector<IntVec> w;
  ConeTarget target;
  target.b0 = inst.b0();
  target.lower = 0;
  target.upper = 0;
  for (std::size_t k = 0; k < inst.num_types(); ++k) {
    const auto& ty = inst.type(k);
    BrickSet s = enumerate_bricks(a.a2(), ty.b, ty.lower, ty.upper, options.brick_cap);
    s.type = k;
    if (s.elements.empty()) return std::nullopt;
    auto [lk, uk] = brick_extremes(s, ty.w);
    target.lower += ty.count * lk;
    target.upper += ty.count * uk;
    target.counts.push_back(ty.count);
    w.push_back(ty.w);
    sets.push_back(std::move(s));
  }

  auto to_cp = [](std::vector<BrickMap> maps) { return CompactPresentation{std::move(maps)}; };
  auto found = cone_membership(a.a1(), sets, target, w, options, stats);
  if (!found) return std::nullopt;
  CompactPresentation best = to_cp(std::move(*found));

  // Invariant: the optimum lies in [lower, upper] and `best` attains upper.
  Int lower = target.lower;
  Int upper = cost(inst, best);
  while (lower < upper) {
    Int mid = floor_div(lower + upper, 2);
    ConeTarget window = target;
    window.lower = lower;
    window.upper = mid;
    auto hit = cone_membership(a.a1(), sets, window, w, options, stats);
    if (hit) {
      best = to_cp(std::move(*hit));
      upper = cost(inst, best);
    } else {
      lower = mid + 1;
    }
  }
  return reduce_support(inst, best);
}

}  // namespace hugenfold

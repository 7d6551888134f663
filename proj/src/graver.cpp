#include "hugenfold/graver.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <utility>

namespace hugenfold {

bool conformal_leq(std::span<const Int> x, std::span<const Int> y) {
  if (x.size() != y.size()) throw DimensionError("conformal_leq: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_zero()) continue;
    if (x[i].sign() != y[i].sign()) return false;
    if (abs(x[i]) > abs(y[i])) return false;
  }
  return true;
}

std::vector<IntVec> integer_kernel_basis(const IntMatrix& b) {
  const std::size_t m = b.rows(), n = b.cols();
  // Column operations on [B; I]; the identity part records the transform.
  std::vector<IntVec> cols(n, IntVec(m + n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) cols[j][i] = b(i, j);
    cols[j][m + j] = 1;
  }
  std::size_t piv = 0;
  for (std::size_t row = 0; row < m && piv < n; ++row) {
    while (true) {
      std::size_t best = n;
      std::size_t nonzero = 0;
      for (std::size_t j = piv; j < n; ++j) {
        if (cols[j][row].is_zero()) continue;
        ++nonzero;
        if (best == n || abs(cols[j][row]) < abs(cols[best][row])) best = j;
      }
      if (nonzero == 0) break;
      if (nonzero == 1) {
        std::swap(cols[piv], cols[best]);
        ++piv;
        break;
      }
      for (std::size_t j = piv; j < n; ++j) {
        if (j == best || cols[j][row].is_zero()) continue;
        Int q = cols[j][row] / cols[best][row];
        for (std::size_t i = 0; i < m + n; ++i) cols[j][i] -= q * cols[best][i];
      }
    }
  }
  std::vector<IntVec> basis;
  for (std::size_t j = piv; j < n; ++j) basis.emplace_back(cols[j].begin() + static_cast<std::ptrdiff_t>(m), cols[j].end());

  // Row echelon form with reduced entries above each pivot.
  std::size_t r = 0;
  const std::size_t k = basis.size();
  for (std::size_t c = 0; c < n && r < k; ++c) {
    while (true) {
      std::size_t best = k;
      std::size_t nonzero = 0;
      for (std::size_t i = r; i < k; ++i) {
        if (basis[i][c].is_zero()) continue;
        ++nonzero;
        if (best == k || abs(basis[i][c]) < abs(basis[best][c])) best = i;
      }
      if (nonzero == 0) break;
      if (nonzero == 1) {
        std::swap(basis[r], basis[best]);
        if (basis[r][c] < 0)
          for (auto& v : basis[r]) v = -v;
        for (std::size_t i = 0; i < r; ++i) {
          Int q = basis[i][c] / basis[r][c];
          if (basis[i][c] - q * basis[r][c] < 0) q -= 1;
          if (!q.is_zero())
            for (std::size_t j = 0; j < n; ++j) basis[i][j] -= q * basis[r][j];
        }
        ++r;
        break;
      }
      for (std::size_t i = r; i < k; ++i) {
        if (i == best || basis[i][c].is_zero()) continue;
        Int q = basis[i][c] / basis[best][c];
        for (std::size_t j = 0; j < n; ++j) basis[i][j] -= q * basis[best][j];
      }
    }
  }
  return basis;
}

namespace {

using Word = std::uint64_t;

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw BudgetError("Graver computation left the 64-bit range");
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw BudgetError("Graver computation left the 64-bit range");
  return out;
}

std::int64_t to_small(const Int& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min() + 1) {
    throw BudgetError("Graver computation needs entries beyond the 64-bit range");
  }
  return static_cast<std::int64_t>(v);
}

// Flat store of lattice vectors with sign masks and norms taken over the
// coordinates currently under consideration.
class Store {
public:
  explicit Store(std::size_t n) : n_(n), words_((n + 63) / 64), considered_(words_, 0) {}

  std::size_t size() const { return norms_.size(); }
  std::size_t dim() const { return n_; }
  std::span<const std::int64_t> vec(std::size_t i) const { return {vals_.data() + i * n_, n_}; }

  void consider(std::size_t coord) { considered_[coord / 64] |= Word{1} << (coord % 64); }
  bool considered(std::size_t coord) const { return (considered_[coord / 64] >> (coord % 64)) & 1; }

  void push(std::span<const std::int64_t> v) {
    vals_.insert(vals_.end(), v.begin(), v.end());
    pos_.resize(pos_.size() + words_, 0);
    neg_.resize(neg_.size() + words_, 0);
    norms_.push_back(0);
    refresh(size() - 1);
  }

  void refresh_all() {
    for (std::size_t i = 0; i < size(); ++i) refresh(i);
  }

  std::int64_t norm(std::size_t i) const { return norms_[i]; }
  const Word* pos(std::size_t i) const { return pos_.data() + i * words_; }
  const Word* neg(std::size_t i) const { return neg_.data() + i * words_; }
  std::size_t words() const { return words_; }
  const std::vector<Word>& considered_mask() const { return considered_; }

  void keep(const std::vector<bool>& keep) {
    Store out(n_);
    out.considered_ = considered_;
    for (std::size_t i = 0; i < size(); ++i)
      if (keep[i]) out.push(vec(i));
    *this = std::move(out);
  }

private:
  void refresh(std::size_t i) {
    Word* p = pos_.data() + i * words_;
    Word* q = neg_.data() + i * words_;
    std::fill(p, p + words_, 0);
    std::fill(q, q + words_, 0);
    std::int64_t norm = 0;
    const std::int64_t* v = vals_.data() + i * n_;
    for (std::size_t c = 0; c < n_; ++c) {
      if (v[c] == 0 || !considered(c)) continue;
      if (v[c] > 0) p[c / 64] |= Word{1} << (c % 64);
      else q[c / 64] |= Word{1} << (c % 64);
      norm = checked_add(norm, v[c] > 0 ? v[c] : -v[c]);
    }
    norms_[i] = norm;
  }

  std::size_t n_;
  std::size_t words_;
  std::vector<Word> considered_;
  std::vector<std::int64_t> vals_;
  std::vector<Word> pos_, neg_;
  std::vector<std::int64_t> norms_;
};

// Working vector being reduced.
struct Probe {
  std::vector<std::int64_t> v;
  std::vector<Word> pos, neg;
  std::int64_t norm = 0;

  void rebuild(const Store& g) {
    const std::size_t w = g.words();
    pos.assign(w, 0);
    neg.assign(w, 0);
    norm = 0;
    for (std::size_t c = 0; c < v.size(); ++c) {
      if (v[c] == 0 || !g.considered(c)) continue;
      if (v[c] > 0) pos[c / 64] |= Word{1} << (c % 64);
      else neg[c / 64] |= Word{1} << (c % 64);
      norm = checked_add(norm, v[c] > 0 ? v[c] : -v[c]);
    }
  }
};

// How many times element i fits conformally into the probe (0 if never).
std::int64_t fits(const Store& g, std::size_t i, const Probe& s) {
  if (g.norm(i) > s.norm || g.norm(i) == 0) return 0;
  const Word* gp = g.pos(i);
  const Word* gn = g.neg(i);
  for (std::size_t w = 0; w < g.words(); ++w) {
    if ((gp[w] & ~s.pos[w]) != 0 || (gn[w] & ~s.neg[w]) != 0) return 0;
  }
  std::int64_t times = std::numeric_limits<std::int64_t>::max();
  auto v = g.vec(i);
  for (std::size_t c = 0; c < v.size(); ++c) {
    if (v[c] == 0 || !g.considered(c)) continue;
    std::int64_t a = v[c] > 0 ? v[c] : -v[c];
    std::int64_t b = s.v[c] > 0 ? s.v[c] : -s.v[c];
    if (a > b) return 0;
    times = std::min(times, b / a);
  }
  return times;
}

bool sign_compatible(const Store& g, std::size_t i, std::size_t j) {
  for (std::size_t w = 0; w < g.words(); ++w) {
    if ((g.pos(i)[w] & g.neg(j)[w]) != 0 || (g.neg(i)[w] & g.pos(j)[w]) != 0) return false;
  }
  return true;
}

class Completion {
public:
  Completion(Store& g, std::size_t cap) : g_(g), cap_(cap) {}

  void run() {
    g_.refresh_all();
    rebuild_order();
    for (std::size_t j = 0; j < g_.size(); ++j)
      for (std::size_t i = 0; i < j; ++i) queue_pair(i, j);
    while (!buckets_.empty()) {
      auto it = buckets_.begin();
      if (it->second.empty()) {
        buckets_.erase(it);
        continue;
      }
      auto [i, j] = it->second.back();
      it->second.pop_back();
      Probe s;
      s.v.resize(g_.dim());
      auto a = g_.vec(i), b = g_.vec(j);
      for (std::size_t c = 0; c < s.v.size(); ++c) s.v[c] = checked_add(a[c], b[c]);
      s.rebuild(g_);
      if (s.norm == 0) continue;
      reduce(s);
      if (s.norm == 0) continue;
      add(s);
    }
    filter_minimal();
  }

private:
  void queue_pair(std::size_t i, std::size_t j) {
    if (sign_compatible(g_, i, j)) return;
    auto a = g_.vec(i), b = g_.vec(j);
    std::int64_t norm = 0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      if (!g_.considered(c)) continue;
      std::int64_t x = checked_add(a[c], b[c]);
      norm = checked_add(norm, x > 0 ? x : -x);
    }
    if (norm == 0) return;
    buckets_[norm].emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  }

  void reduce(Probe& s) {
    bool changed = true;
    while (changed && s.norm > 0) {
      changed = false;
      for (std::size_t idx : order_) {
        if (g_.norm(idx) > s.norm) break;
        std::int64_t k = fits(g_, idx, s);
        if (k == 0) continue;
        auto v = g_.vec(idx);
        for (std::size_t c = 0; c < s.v.size(); ++c)
          if (v[c] != 0) s.v[c] = checked_add(s.v[c], -checked_mul(k, v[c]));
        s.rebuild(g_);
        changed = true;
        break;
      }
    }
  }

  void add(const Probe& s) {
    if (g_.size() >= cap_) {
      throw BudgetError("Graver basis exceeds the element cap of " + std::to_string(cap_));
    }
    g_.push(s.v);
    std::size_t idx = g_.size() - 1;
    auto pos = std::upper_bound(order_.begin(), order_.end(), g_.norm(idx),
                                [&](std::int64_t n, std::size_t k) { return n < g_.norm(k); });
    order_.insert(pos, idx);
    for (std::size_t j = 0; j < idx; ++j) queue_pair(j, idx);
  }

  void rebuild_order() {
    order_.resize(g_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return g_.norm(a) < g_.norm(b); });
  }

  void filter_minimal() {
    std::vector<bool> keep(g_.size(), true);
    rebuild_order();
    for (std::size_t i = 0; i < g_.size(); ++i) {
      Probe s;
      auto v = g_.vec(i);
      s.v.assign(v.begin(), v.end());
      s.rebuild(g_);
      if (s.norm == 0) {
        keep[i] = false;
        continue;
      }
      for (std::size_t j : order_) {
        if (g_.norm(j) > s.norm) break;
        if (j == i || !keep[j]) continue;
        if (fits(g_, j, s) > 0) {
          // Equal elements: keep the first copy only.
          keep[i] = false;
          break;
        }
      }
    }
    g_.keep(keep);
  }

  Store& g_;
  std::size_t cap_;
  std::vector<std::size_t> order_;
  std::map<std::int64_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>> buckets_;
};

}  // namespace

GraverBasis graver_basis(const IntMatrix& b, const GraverOptions& options) {
  if (b.cols() == 0) throw PreconditionError("graver_basis needs at least one column");
  GraverBasis out{b, {}};
  const auto basis = integer_kernel_basis(b);
  if (basis.empty()) return out;
  const std::size_t n = b.cols();

  Store g(n);
  std::vector<bool> pivot(n, false);
  bool unimodular = true;
  for (const auto& row : basis) {
    std::size_t c = 0;
    while (row[c].is_zero()) ++c;
    pivot[c] = true;
    g.consider(c);
    if (row[c] != 1) unimodular = false;
  }
  std::vector<std::int64_t> buf(n);
  for (const auto& row : basis) {
    for (std::size_t c = 0; c < n; ++c) buf[c] = to_small(row[c]);
    g.push(buf);
    for (auto& x : buf) x = -x;
    g.push(buf);
  }
  // With unit pivots the projection onto the pivot coordinates is all of
  // Z^k and ± the basis rows are already its Graver basis.
  if (!unimodular) Completion(g, options.element_cap).run();
  for (std::size_t c = 0; c < n; ++c) {
    if (pivot[c]) continue;
    g.consider(c);
    Completion(g, options.element_cap).run();
  }

  out.elements.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto v = g.vec(i);
    out.elements.emplace_back(v.begin(), v.end());
  }
  std::sort(out.elements.begin(), out.elements.end());
  out.elements.erase(std::unique(out.elements.begin(), out.elements.end()), out.elements.end());
  return out;
}

std::size_t graver_complexity(const Bimatrix& a, const GraverOptions& options) {
  const auto inner = graver_basis(a.a2(), options);
  if (inner.elements.empty()) return 0;
  // One column A1·v per Graver element v of A2 (both signs).
  IntMatrix d(a.r(), inner.elements.size());
  for (std::size_t j = 0; j < inner.elements.size(); ++j) {
    const IntVec col = matvec(a.a1(), inner.elements[j]);
    for (std::size_t i = 0; i < a.r(); ++i) d(i, j) = col[i];
  }
  const auto outer = graver_basis(d, options);
  std::size_t best = 0;
  for (const auto& e : outer.elements) {
    Int norm = 0;
    for (const auto& x : e) norm += abs(x);
    best = std::max(best, static_cast<std::size_t>(norm));
  }
  return best;
}

Template canonical_template(std::span<const Int> element, std::size_t brick_width) {
  if (brick_width == 0 || element.size() % brick_width != 0) {
    throw DimensionError("element length is not a multiple of the brick width");
  }
  Template t;
  for (std::size_t off = 0; off < element.size(); off += brick_width) {
    auto brick = element.subspan(off, brick_width);
    if (!is_zero(brick)) t.bricks.emplace_back(brick.begin(), brick.end());
  }
  std::sort(t.bricks.begin(), t.bricks.end());
  return t;
}

GraverTemplates graver_templates(const Bimatrix& a, const GraverOptions& options) {
  return graver_templates(a, graver_complexity(a, options), options);
}

GraverTemplates graver_templates(const Bimatrix& a, std::size_t complexity, const GraverOptions& options) {
  GraverTemplates out{a, complexity, {}, true};
  if (complexity == 0) return out;
  const auto basis = graver_basis(nfold_product(a, complexity), options);
  std::set<Template> unique;
  for (const auto& e : basis.elements) unique.insert(canonical_template(e, a.d()));
  out.templates.assign(unique.begin(), unique.end());
  return out;
}

Lifting::Lifting(const Template& t, std::vector<std::size_t> positions, std::size_t n)
    : template_(&t), positions_(std::move(positions)), n_(n), width_(t.bricks.empty() ? 0 : t.bricks.front().size()) {
  if (positions_.size() != t.bricks.size()) {
    throw PreconditionError("lifting needs one position per template brick");
  }
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (positions_[i] < 1 || positions_[i] > n_) throw PreconditionError("lifting position out of range");
    if (i > 0 && positions_[i] <= positions_[i - 1]) throw PreconditionError("lifting positions must increase");
  }
}

IntVec Lifting::brick(std::size_t p) const {
  if (p < 1 || p > n_) throw PreconditionError("brick position out of range");
  auto it = std::lower_bound(positions_.begin(), positions_.end(), p);
  if (it != positions_.end() && *it == p) return template_->bricks[static_cast<std::size_t>(it - positions_.begin())];
  return zeros(width_);
}

IntVec Lifting::materialize() const {
  IntVec out;
  out.reserve(n_ * width_);
  for (std::size_t p = 1; p <= n_; ++p) {
    IntVec b = brick(p);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

}  // namespace hugenfold

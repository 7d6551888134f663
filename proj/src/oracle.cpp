#include "hugenfold/oracle.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

namespace hugenfold::oracle {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using Small = std::vector<long long>;

class NodeCounter {
public:
  explicit NodeCounter(std::uint64_t budget) : budget_(budget) {}
  void tick() {
    if (++used_ > budget_) throw BudgetError("brute-force oracle exceeded its node budget");
  }

private:
  std::uint64_t budget_;
  std::uint64_t used_ = 0;
};

long long small(const Int& v) { return static_cast<long long>(v); }

bool below(const Small& x, const Small& y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    if ((x[i] > 0) != (y[i] > 0) || y[i] == 0) return false;
    if (std::llabs(x[i]) > std::llabs(y[i])) return false;
  }
  return true;
}

long long norm1(const Small& x) {
  long long s = 0;
  for (long long v : x) s += std::llabs(v);
  return s;
}

}  // namespace

std::vector<IntVec> bf_graver(const IntMatrix& b, long long radius, std::uint64_t budget) {
  const std::size_t n = b.cols(), m = b.rows();
  // Reduced row echelon form over Q: pivot coordinates are functions of the
  // free ones, so the box scan only walks the free coordinates.
  std::vector<std::vector<Rational>> rref(m, std::vector<Rational>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) rref[i][j] = Rational(b(i, j));
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < m; ++c) {
    std::size_t p = row;
    while (p < m && rref[p][c] == 0) ++p;
    if (p == m) continue;
    std::swap(rref[p], rref[row]);
    Rational lead = rref[row][c];
    for (auto& v : rref[row]) v /= lead;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row || rref[i][c] == 0) continue;
      Rational f = rref[i][c];
      for (std::size_t j = 0; j < n; ++j) rref[i][j] -= f * rref[row][j];
    }
    pivots.push_back(c);
    ++row;
  }
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < n; ++c)
    if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) free.push_back(c);

  // x_pivot[i] = (sum_j coeff[i][j] * x_free[j]) / den
  Int den = 1;
  for (std::size_t i = 0; i < pivots.size(); ++i)
    for (std::size_t f : free) den = boost::multiprecision::lcm(den, Int(denominator(rref[i][f])));
  std::vector<Small> coeff(pivots.size(), Small(free.size()));
  for (std::size_t i = 0; i < pivots.size(); ++i)
    for (std::size_t j = 0; j < free.size(); ++j) {
      Rational v = -rref[i][free[j]] * Rational(den);
      coeff[i][j] = small(numerator(v));
    }
  const long long dd = small(den);

  NodeCounter nodes(budget);
  std::vector<Small> kernel;
  Small fv(free.size(), -radius);
  if (free.empty()) return {};
  while (true) {
    nodes.tick();
    Small x(n, 0);
    bool ok = true;
    for (std::size_t j = 0; j < free.size(); ++j) x[free[j]] = fv[j];
    for (std::size_t i = 0; i < pivots.size() && ok; ++i) {
      long long acc = 0;
      for (std::size_t j = 0; j < free.size(); ++j) acc += coeff[i][j] * fv[j];
      if (acc % dd != 0) ok = false;
      else {
        acc /= dd;
        if (std::llabs(acc) > radius) ok = false;
        x[pivots[i]] = acc;
      }
    }
    if (ok && norm1(x) > 0) kernel.push_back(std::move(x));
    std::size_t k = 0;
    while (k < fv.size() && fv[k] == radius) fv[k++] = -radius;
    if (k == fv.size()) break;
    ++fv[k];
  }

  // Every non-minimal point dominates a minimal one of smaller norm.
  std::stable_sort(kernel.begin(), kernel.end(), [](const Small& a, const Small& c) { return norm1(a) < norm1(c); });
  std::vector<Small> minimal;
  for (const auto& v : kernel) {
    bool dominated = false;
    for (const auto& g : minimal)
      if (below(g, v)) {
        dominated = true;
        break;
      }
    if (!dominated) minimal.push_back(v);
  }
  std::vector<IntVec> out;
  for (const auto& v : minimal) out.emplace_back(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct TableState {
  std::size_t l, m, n;
  std::vector<long long> line;                // remaining line sums, i + l*j
  std::vector<std::vector<long long>> rows;   // per layer remaining row sums
  std::vector<std::vector<long long>> cols;   // per layer remaining column sums
  std::vector<std::vector<long long>> cells;  // per layer entries
};

TableState make_state(const TableSearch& s) {
  const std::size_t n = s.row_sums.size();
  if (s.col_sums.size() != n) throw DimensionError("bf_tables: row and column sums disagree on layer count");
  if (s.line_sums.rows() != s.l || s.line_sums.cols() != s.m) throw DimensionError("bf_tables: line sums shape");
  TableState st{s.l, s.m, n, {}, {}, {}, {}};
  st.line.resize(s.l * s.m);
  for (std::size_t i = 0; i < s.l; ++i)
    for (std::size_t j = 0; j < s.m; ++j) st.line[i + s.l * j] = small(s.line_sums(i, j));
  for (std::size_t k = 0; k < n; ++k) {
    if (s.row_sums[k].size() != s.l || s.col_sums[k].size() != s.m) throw DimensionError("bf_tables: margin length");
    st.rows.emplace_back();
    st.cols.emplace_back();
    for (const auto& v : s.row_sums[k]) st.rows.back().push_back(small(v));
    for (const auto& v : s.col_sums[k]) st.cols.back().push_back(small(v));
    st.cells.emplace_back(s.l * s.m, 0);
  }
  return st;
}

Table snapshot(const TableState& st) {
  Table t;
  for (const auto& layer : st.cells) t.emplace_back(layer.begin(), layer.end());
  return t;
}

bool any_negative(const std::vector<long long>& v) {
  return std::any_of(v.begin(), v.end(), [](long long x) { return x < 0; });
}

}  // namespace

TableResult bf_tables(const TableSearch& search, bool first_only, TableScan order, std::uint64_t budget) {
  TableState st = make_state(search);
  TableResult result;
  NodeCounter nodes(budget);
  const std::size_t l = st.l, m = st.m, n = st.n;
  for (const auto& r : st.rows)
    if (any_negative(r)) return result;
  for (const auto& c : st.cols)
    if (any_negative(c)) return result;
  if (any_negative(st.line)) return result;
  if (n == 0) {
    if (std::all_of(st.line.begin(), st.line.end(), [](long long v) { return v == 0; })) {
      result.feasible = true;
      result.tables.push_back({});
    }
    return result;
  }

  auto record = [&]() {
    result.feasible = true;
    result.tables.push_back(snapshot(st));
    return first_only;
  };

  if (order == TableScan::LayerMajor) {
    // Cells of layer k in column-major order; the last cell of a row or
    // column, and every cell of the last layer, is forced.
    std::function<bool(std::size_t, std::size_t)> visit = [&](std::size_t k, std::size_t cell) -> bool {
      nodes.tick();
      if (cell == l * m) {
        if (k + 1 == n) {
          return std::all_of(st.line.begin(), st.line.end(), [](long long v) { return v == 0; }) && record();
        }
        return visit(k + 1, 0);
      }
      const std::size_t i = cell % l, j = cell / l;
      long long hi = std::min({st.rows[k][i], st.cols[k][j], st.line[cell]});
      long long lo = 0;
      if (j + 1 == m) lo = std::max(lo, st.rows[k][i]);
      if (i + 1 == l) lo = std::max(lo, st.cols[k][j]);
      if (k + 1 == n) lo = std::max(lo, st.line[cell]);
      for (long long v = lo; v <= hi; ++v) {
        st.rows[k][i] -= v;
        st.cols[k][j] -= v;
        st.line[cell] -= v;
        st.cells[k][cell] = v;
        bool stop = visit(k, cell + 1);
        st.rows[k][i] += v;
        st.cols[k][j] += v;
        st.line[cell] += v;
        st.cells[k][cell] = 0;
        if (stop) return true;
      }
      return false;
    };
    visit(0, 0);
    return result;
  }

  // Line-major: cells in row-major order, each line-sum split over layers.
  std::vector<std::size_t> cells_order;
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < m; ++j) cells_order.push_back(i + l * j);
  std::function<bool(std::size_t, std::size_t)> split = [&](std::size_t idx, std::size_t k) -> bool {
    nodes.tick();
    if (idx == cells_order.size()) {
      for (std::size_t q = 0; q < n; ++q) {
        if (std::any_of(st.rows[q].begin(), st.rows[q].end(), [](long long v) { return v != 0; })) return false;
        if (std::any_of(st.cols[q].begin(), st.cols[q].end(), [](long long v) { return v != 0; })) return false;
      }
      return record();
    }
    const std::size_t cell = cells_order[idx];
    const std::size_t i = cell % l, j = cell / l;
    if (k == n) {
      if (st.line[cell] != 0) return false;
      // Finishing a row of cells closes the row sums of every layer.
      if (j + 1 == m)
        for (std::size_t q = 0; q < n; ++q)
          if (st.rows[q][i] != 0) return false;
      if (i + 1 == l)
        for (std::size_t q = 0; q < n; ++q)
          if (st.cols[q][j] != 0) return false;
      return split(idx + 1, 0);
    }
    long long hi = std::min({st.rows[k][i], st.cols[k][j], st.line[cell]});
    long long lo = (k + 1 == n) ? st.line[cell] : 0;
    for (long long v = lo; v <= hi; ++v) {
      st.rows[k][i] -= v;
      st.cols[k][j] -= v;
      st.line[cell] -= v;
      st.cells[k][cell] = v;
      bool stop = split(idx, k + 1);
      st.rows[k][i] += v;
      st.cols[k][j] += v;
      st.line[cell] += v;
      st.cells[k][cell] = 0;
      if (stop) return true;
    }
    return false;
  };
  split(0, 0);
  return result;
}

NFoldResult bf_nfold(const HugeNFoldInstance& inst, bool reverse_order, std::uint64_t budget) {
  const Bimatrix& a = inst.bimatrix();
  const std::size_t d = a.d();
  NodeCounter nodes(budget);

  // Legal bricks per type by scanning the bounding box.
  std::vector<std::vector<IntVec>> legal(inst.num_types());
  for (std::size_t k = 0; k < inst.num_types(); ++k) {
    const auto& t = inst.type(k);
    Small lo(d), hi(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (!t.lower[j].finite() || !t.upper[j].finite()) throw PreconditionError("bf_nfold needs finite bounds");
      lo[j] = small(t.lower[j].value());
      hi[j] = small(t.upper[j].value());
    }
    Small z = lo;
    while (true) {
      nodes.tick();
      IntVec zi(z.begin(), z.end());
      if (matvec(a.a2(), zi) == t.b) legal[k].push_back(std::move(zi));
      std::size_t j = 0;
      while (j < d && z[j] == hi[j]) {
        z[j] = lo[j];
        ++j;
      }
      if (j == d) break;
      ++z[j];
    }
    if (reverse_order) std::reverse(legal[k].begin(), legal[k].end());
  }

  std::vector<std::size_t> counts;
  for (const auto& t : inst.types()) {
    if (t.count > 64) throw PreconditionError("bf_nfold is limited to small brick counts");
    counts.push_back(static_cast<std::size_t>(t.count));
  }

  NFoldResult best;
  std::vector<IntVec> chosen;
  IntVec aggregate = zeros(a.r());
  Int cost = 0;

  // Multisets per type: indices non-decreasing within a type.
  std::function<void(std::size_t, std::size_t, std::size_t)> walk = [&](std::size_t k, std::size_t used,
                                                                        std::size_t from) {
    nodes.tick();
    if (k == counts.size()) {
      if (aggregate != inst.b0()) return;
      std::vector<IntVec> canon;
      std::size_t off = 0;
      for (std::size_t q = 0; q < counts.size(); ++q) {
        std::vector<IntVec> part(chosen.begin() + static_cast<std::ptrdiff_t>(off),
                                 chosen.begin() + static_cast<std::ptrdiff_t>(off + counts[q]));
        std::sort(part.begin(), part.end());
        canon.insert(canon.end(), part.begin(), part.end());
        off += counts[q];
      }
      if (!best.feasible || cost < best.optimum || (cost == best.optimum && canon < best.bricks)) {
        best.feasible = true;
        best.optimum = cost;
        best.bricks = std::move(canon);
      }
      return;
    }
    if (used == counts[k]) {
      walk(k + 1, 0, 0);
      return;
    }
    for (std::size_t idx = from; idx < legal[k].size(); ++idx) {
      const IntVec& z = legal[k][idx];
      const IntVec az = matvec(a.a1(), z);
      const Int wz = dot(inst.type(k).w, z);
      for (std::size_t i = 0; i < az.size(); ++i) aggregate[i] += az[i];
      cost += wz;
      chosen.push_back(z);
      walk(k, used + 1, idx);
      chosen.pop_back();
      cost -= wz;
      for (std::size_t i = 0; i < az.size(); ++i) aggregate[i] -= az[i];
    }
  };
  walk(0, 0, 0);
  return best;
}

}  // namespace hugenfold::oracle

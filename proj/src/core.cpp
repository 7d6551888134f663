#include "hugenfold/core.hpp"

#include <algorithm>
#include <sstream>

namespace hugenfold {

Int parse_int(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
  if (body.empty() || !std::all_of(body.begin(), body.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError("not a decimal integer: '" + std::string(text) + "'");
  }
  if (text.front() == '+') text.remove_prefix(1);
  return Int(std::string(text));
}

std::string to_string(const Int& v) { return v.str(); }

ExtInt ExtInt::parse(std::string_view text) {
  if (text == "inf" || text == "+inf") return pos_inf();
  if (text == "-inf") return neg_inf();
  return ExtInt(parse_int(text));
}

const Int& ExtInt::value() const {
  if (!finite()) throw InternalError("value() of an infinite bound");
  return value_;
}

std::string ExtInt::str() const {
  switch (kind_) {
    case Kind::NegInf: return "-inf";
    case Kind::PosInf: return "inf";
    case Kind::Finite: break;
  }
  return value_.str();
}

bool operator==(const ExtInt& a, const ExtInt& b) {
  return a.kind_ == b.kind_ && (!a.finite() || a.value_ == b.value_);
}

std::strong_ordering operator<=>(const ExtInt& a, const ExtInt& b) {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
  if (!a.finite()) return std::strong_ordering::equal;
  return a.value_ < b.value_ ? std::strong_ordering::less
         : a.value_ > b.value_ ? std::strong_ordering::greater
                               : std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const ExtInt& a, const Int& b) { return a <=> ExtInt(b); }

ExtInt operator+(const ExtInt& a, const ExtInt& b) {
  if (a.finite() && b.finite()) return ExtInt(a.value_ + b.value_);
  if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf())) {
    throw InternalError("inf - inf is undefined");
  }
  return a.finite() ? b : a;
}

ExtInt operator-(const ExtInt& a, const ExtInt& b) {
  ExtInt nb = b;
  if (b.finite()) nb.value_ = -b.value_;
  else nb.kind_ = b.is_pos_inf() ? ExtInt::Kind::NegInf : ExtInt::Kind::PosInf;
  return a + nb;
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVec>& rows, std::size_t cols) {
  IntMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw DimensionError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                           " entries, expected " + std::to_string(cols));
    }
    std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  return m;
}

IntMatrix IntMatrix::from_rows(std::initializer_list<std::initializer_list<long long>> rows) {
  std::vector<IntVec> v;
  std::size_t cols = rows.size() ? rows.begin()->size() : 0;
  for (const auto& r : rows) v.push_back(IntVec(r.begin(), r.end()));
  return from_rows(v, cols);
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntVec IntMatrix::column(std::size_t c) const {
  IntVec out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::vector<IntVec> IntMatrix::row_vectors() const {
  std::vector<IntVec> out;
  out.reserve(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out.emplace_back(row(r).begin(), row(r).end());
  return out;
}

Bimatrix::Bimatrix(IntMatrix a1, IntMatrix a2) : a1_(std::move(a1)), a2_(std::move(a2)) {
  d_ = std::max(a1_.cols(), a2_.cols());
  if (d_ == 0) throw DimensionError("bimatrix needs at least one column");
  // An empty block may arrive without a column count.
  if (a1_.rows() == 0) a1_ = IntMatrix(0, d_);
  if (a2_.rows() == 0) a2_ = IntMatrix(0, d_);
  if (a1_.cols() != d_ || a2_.cols() != d_) {
    throw DimensionError("bimatrix blocks have " + std::to_string(a1_.cols()) + " and " +
                         std::to_string(a2_.cols()) + " columns");
  }
}

IntMatrix nfold_product(const Bimatrix& a, std::size_t n) {
  if (n == 0) throw PreconditionError("n-fold product needs n >= 1");
  const std::size_t d = a.d();
  if (n > kMaxMaterializedColumns / d) {
    throw DimensionError("n-fold product with " + std::to_string(n) + " bricks of width " + std::to_string(d) +
                         " exceeds the materialization limit of " + std::to_string(kMaxMaterializedColumns) +
                         " columns");
  }
  const std::size_t r = a.r(), s = a.s();
  IntMatrix m(r + s * n, d * n);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < d; ++j) m(i, b * d + j) = a.a1()(i, j);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < d; ++j) m(r + b * s + i, b * d + j) = a.a2()(i, j);
  }
  return m;
}

IntVec matvec(const IntMatrix& m, std::span<const Int> x) {
  if (m.cols() != x.size()) {
    throw DimensionError("matvec: matrix has " + std::to_string(m.cols()) + " columns, vector has " +
                         std::to_string(x.size()) + " entries");
  }
  IntVec out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Int acc = 0;
    auto row = m.row(r);
    for (std::size_t c = 0; c < x.size(); ++c)
      if (!row[c].is_zero() && !x[c].is_zero()) acc += row[c] * x[c];
    out[r] = std::move(acc);
  }
  return out;
}

Int dot(std::span<const Int> w, std::span<const Int> x) {
  if (w.size() != x.size()) throw DimensionError("dot: length mismatch");
  Int acc = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!w[i].is_zero() && !x[i].is_zero()) acc += w[i] * x[i];
  return acc;
}

bool in_box(std::span<const Int> x, std::span<const ExtInt> lower, std::span<const ExtInt> upper) {
  if (x.size() != lower.size() || x.size() != upper.size()) throw DimensionError("in_box: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (lower[i] > x[i] || upper[i] < x[i]) return false;
  }
  return true;
}

IntVec add(std::span<const Int> a, std::span<const Int> b) {
  if (a.size() != b.size()) throw DimensionError("add: length mismatch");
  IntVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

IntVec sub(std::span<const Int> a, std::span<const Int> b) {
  if (a.size() != b.size()) throw DimensionError("sub: length mismatch");
  IntVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

IntVec scale(const Int& k, std::span<const Int> a) {
  IntVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = k * a[i];
  return out;
}

IntVec zeros(std::size_t n) { return IntVec(n, Int(0)); }

bool is_zero(std::span<const Int> a) {
  return std::all_of(a.begin(), a.end(), [](const Int& v) { return v.is_zero(); });
}

IntVec to_intvec(std::initializer_list<long long> values) { return IntVec(values.begin(), values.end()); }

std::string to_string(std::span<const Int> v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

}  // namespace hugenfold

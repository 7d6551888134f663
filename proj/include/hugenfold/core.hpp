#pragma once

// Exact integer vectors and matrices, extended bounds, bimatrices and
// explicit n-fold products.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hugenfold/errors.hpp"

namespace hugenfold {

using Int = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                          boost::multiprecision::et_off>;

using IntVec = std::vector<Int>;

Int parse_int(std::string_view text);
std::string to_string(const Int& v);

/// An integer or one of the two infinities. Arithmetic with infinities is
/// limited to what bound handling needs; inf - inf throws.
class ExtInt {
public:
  enum class Kind : std::uint8_t { NegInf, Finite, PosInf };

  ExtInt() = default;
  ExtInt(Int v) : kind_(Kind::Finite), value_(std::move(v)) {}
  ExtInt(long long v) : kind_(Kind::Finite), value_(v) {}

  static ExtInt pos_inf() { return ExtInt(Kind::PosInf); }
  static ExtInt neg_inf() { return ExtInt(Kind::NegInf); }
  static ExtInt parse(std::string_view text);

  Kind kind() const { return kind_; }
  bool finite() const { return kind_ == Kind::Finite; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  /// Throws if infinite.
  const Int& value() const;

  std::string str() const;

  friend bool operator==(const ExtInt& a, const ExtInt& b);
  friend std::strong_ordering operator<=>(const ExtInt& a, const ExtInt& b);
  friend bool operator==(const ExtInt& a, const Int& b) { return a.finite() && a.value_ == b; }
  friend std::strong_ordering operator<=>(const ExtInt& a, const Int& b);

  friend ExtInt operator+(const ExtInt& a, const ExtInt& b);
  friend ExtInt operator-(const ExtInt& a, const ExtInt& b);

private:
  explicit ExtInt(Kind k) : kind_(k) {}
  Kind kind_ = Kind::Finite;
  Int value_ = 0;
};

using ExtVec = std::vector<ExtInt>;

/// Dense row-major integer matrix.
class IntMatrix {
public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  /// Builds from row arrays; all rows must have length `cols`.
  static IntMatrix from_rows(const std::vector<IntVec>& rows, std::size_t cols);
  static IntMatrix from_rows(std::initializer_list<std::initializer_list<long long>> rows);
  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Int& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Int> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  IntVec column(std::size_t c) const;
  std::vector<IntVec> row_vectors() const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Int> data_;
};

/// The block pair (A1, A2) with a common column count d.
class Bimatrix {
public:
  Bimatrix(IntMatrix a1, IntMatrix a2);

  std::size_t r() const { return a1_.rows(); }
  std::size_t s() const { return a2_.rows(); }
  std::size_t d() const { return d_; }
  const IntMatrix& a1() const { return a1_; }
  const IntMatrix& a2() const { return a2_; }

  friend bool operator==(const Bimatrix&, const Bimatrix&) = default;

private:
  IntMatrix a1_;
  IntMatrix a2_;
  std::size_t d_;
};

inline constexpr std::size_t kMaxMaterializedColumns = 10'000;

/// (r + s*n) x (d*n) matrix: A1 repeated along the top, A2 on the block
/// diagonal. Refuses when d*n exceeds kMaxMaterializedColumns.
IntMatrix nfold_product(const Bimatrix& a, std::size_t n);

IntVec matvec(const IntMatrix& m, std::span<const Int> x);
Int dot(std::span<const Int> w, std::span<const Int> x);
bool in_box(std::span<const Int> x, std::span<const ExtInt> lower, std::span<const ExtInt> upper);

IntVec add(std::span<const Int> a, std::span<const Int> b);
IntVec sub(std::span<const Int> a, std::span<const Int> b);
IntVec scale(const Int& k, std::span<const Int> a);
IntVec zeros(std::size_t n);
bool is_zero(std::span<const Int> a);
IntVec to_intvec(std::initializer_list<long long> values);
std::string to_string(std::span<const Int> v);

}  // namespace hugenfold

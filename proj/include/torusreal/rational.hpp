// Copyright 2026 The torusreal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <concepts>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "torusreal/error.hpp"

namespace torusreal {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using QVector = std::vector<Rational>;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline bool is_integer(const Rational& q) {
  return boost::multiprecision::denominator(q) == 1;
}

inline Integer numerator_of(const Rational& q) {
  return boost::multiprecision::numerator(q);
}

inline Integer denominator_of(const Rational& q) {
  return boost::multiprecision::denominator(q);
}

inline int sign(const Rational& q) { return q.sign(); }

inline std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

/// Parses "7", "-3", "1/4", "-2.125", "1e-3" into an exact rational.
/// Decimal and exponent forms are read exactly, never through a double.
inline std::optional<Rational> parse_rational(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (c != ' ' && c != '\t') s.push_back(c);
  }
  if (s.empty()) return std::nullopt;
  auto parse_int = [](const std::string& t) -> std::optional<Integer> {
    if (t.empty()) return std::nullopt;
    std::size_t start = (t[0] == '+' || t[0] == '-') ? 1 : 0;
    if (start == t.size()) return std::nullopt;
    for (std::size_t i = start; i < t.size(); ++i) {
      if (t[i] < '0' || t[i] > '9') return std::nullopt;
    }
    // cpp_int reads a leading 0 as an octal prefix
    std::string digits = t.substr(start);
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    return t[0] == '-' ? Integer(-Integer(digits)) : Integer(digits);
  };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    auto p = parse_int(s.substr(0, slash));
    auto q = parse_int(s.substr(slash + 1));
    if (!p || !q || *q == 0) return std::nullopt;
    return Rational(*p, *q);
  }
  std::string mantissa = s;
  long long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    mantissa = s.substr(0, e);
    auto ex = parse_int(s.substr(e + 1));
    if (!ex || abs(*ex) > 4000) return std::nullopt;
    exponent = ex->convert_to<long long>();
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '+' || mantissa[0] == '-')) {
    negative = mantissa[0] == '-';
    mantissa = mantissa.substr(1);
  }
  auto dot = mantissa.find('.');
  std::string whole = mantissa.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : mantissa.substr(dot + 1);
  if (whole.empty() && frac.empty()) return std::nullopt;
  for (char c : whole + frac) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  std::string digits = (whole + frac).empty() ? std::string("0") : whole + frac;
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  Integer num(digits);
  exponent -= static_cast<long long>(frac.size());
  Integer ten_pow = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  Rational value = exponent < 0 ? Rational(num, ten_pow) : Rational(num * ten_pow);
  return negative ? Rational(-value) : value;
}

/// Dense exact matrix, row-major.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  QMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static QMatrix identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static QMatrix column(const QVector& v) {
    QMatrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
  }
  static QMatrix row(const QVector& v) {
    QMatrix m(1, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m(0, i) = v[i];
    return m;
  }
  static QMatrix from_columns(const std::vector<QVector>& cols, std::size_t rows) {
    QMatrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != rows) throw DimensionError("column length mismatch");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  QVector col(std::size_t j) const {
    QVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  QVector row_vector(std::size_t i) const {
    return QVector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                   data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }

  QMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    QMatrix m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
  }

  QMatrix transpose() const {
    QMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Rational& q) { return q == 0; });
  }
  bool is_integral() const {
    return std::all_of(data_.begin(), data_.end(), [](const Rational& q) { return is_integer(q); });
  }
  bool is_square() const { return rows_ == cols_; }

  Eigen::MatrixXd to_eigen() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double((*this)(i, j));
    return m;
  }

  friend bool operator==(const QMatrix& a, const QMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  QMatrix& operator+=(const QMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  QMatrix& operator-=(const QMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  QMatrix& operator*=(const Rational& s) {
    for (auto& q : data_) q *= s;
    return *this;
  }
  friend QMatrix operator+(QMatrix a, const QMatrix& b) { return a += b; }
  friend QMatrix operator-(QMatrix a, const QMatrix& b) { return a -= b; }
  friend QMatrix operator*(QMatrix a, const Rational& s) { return a *= s; }
  friend QMatrix operator*(const Rational& s, QMatrix a) { return a *= s; }
  friend QMatrix operator-(QMatrix a) { return a *= Rational(-1); }

  friend QMatrix operator*(const QMatrix& a, const QMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix product shape mismatch");
    QMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Rational& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend QVector operator*(const QMatrix& a, const QVector& x) {
    if (a.cols_ != x.size()) throw DimensionError("matrix-vector shape mismatch");
    QVector y(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) y[i] += a(i, k) * x[k];
    return y;
  }

 private:
  void require_same_shape(const QMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

inline QVector operator+(const QVector& a, const QVector& b) {
  if (a.size() != b.size()) throw DimensionError("vector length mismatch");
  QVector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}
inline QVector operator-(const QVector& a, const QVector& b) {
  if (a.size() != b.size()) throw DimensionError("vector length mismatch");
  QVector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}
inline QVector operator-(const QVector& a) {
  QVector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = -a[i];
  return c;
}
// Templated so that unrelated operator* lookups (Eigen expressions) never
// probe the implicit Rational constructor.
template <class S>
  requires std::same_as<S, Rational>
QVector operator*(const S& s, const QVector& a) {
  QVector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = s * a[i];
  return c;
}

inline Rational dot(const QVector& a, const QVector& b) {
  if (a.size() != b.size()) throw DimensionError("vector length mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// x^T M y
inline Rational bilinear(const QVector& x, const QMatrix& m, const QVector& y) {
  return dot(x, m * y);
}

inline bool is_integral(const QVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return is_integer(q); });
}
inline bool is_zero(const QVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
}

inline Eigen::VectorXd to_eigen(const QVector& v) {
  Eigen::VectorXd e(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) e(static_cast<Eigen::Index>(i)) = to_double(v[i]);
  return e;
}

/// Exact conversion of a double (every finite double is a dyadic rational).
inline Rational from_double(double x) {
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(x, &exp);
  // 2^53 * mant is an integer
  auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r(scaled);
  if (exp > 0) r *= Rational(boost::multiprecision::pow(Integer(2), static_cast<unsigned>(exp)));
  if (exp < 0) r /= Rational(boost::multiprecision::pow(Integer(2), static_cast<unsigned>(-exp)));
  return r;
}

inline QMatrix from_eigen(const Eigen::MatrixXd& m) {
  QMatrix q(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      q(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = from_double(m(i, j));
  return q;
}

// ---------------------------------------------------------------------------
// Exact elimination over Q.

struct RowEchelon {
  QMatrix reduced;                   // reduced row echelon form
  std::vector<std::size_t> pivots;   // pivot column of each nonzero row
  std::size_t rank() const { return pivots.size(); }
};

inline RowEchelon row_reduce(QMatrix m) {
  RowEchelon out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    out.pivots.push_back(c);
    ++r;
  }
  out.reduced = std::move(m);
  return out;
}

inline std::size_t rank(const QMatrix& m) { return row_reduce(m).rank(); }

inline Rational determinant(QMatrix m) {
  if (!m.is_square()) throw DimensionError("determinant of non-square matrix");
  Rational det = 1;
  const std::size_t n = m.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c) == 0) continue;
      Rational f = m(i, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

inline std::optional<QMatrix> inverse(const QMatrix& m) {
  if (!m.is_square()) throw DimensionError("inverse of non-square matrix");
  const std::size_t n = m.rows();
  QMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  RowEchelon e = row_reduce(aug);
  if (e.rank() < n || e.pivots[n - 1] != n - 1) return std::nullopt;
  return e.reduced.block(0, n, n, n);
}

/// Basis of the right kernel {x : m x = 0} over Q.
inline std::vector<QVector> nullspace(const QMatrix& m) {
  RowEchelon e = row_reduce(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<QVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    QVector v(m.cols());
    v[free] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// One solution of m x = rhs (free variables set to zero), or nullopt when
/// the system is inconsistent.
inline std::optional<QVector> solve(const QMatrix& m, const QVector& rhs) {
  if (rhs.size() != m.rows()) throw DimensionError("right-hand side length mismatch");
  QMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = rhs[i];
  }
  RowEchelon e = row_reduce(aug);
  if (!e.pivots.empty() && e.pivots.back() == m.cols()) return std::nullopt;
  QVector x(m.cols());
  for (std::size_t r = 0; r < e.pivots.size(); ++r) x[e.pivots[r]] = e.reduced(r, m.cols());
  return x;
}

// ---------------------------------------------------------------------------
// Integer kernels via unimodular column reduction.

/// Z-basis of the saturated lattice {x in Z^n : m x = 0} for an integral m.
/// Basis vectors are made primitive, sign-normalized (first nonzero entry
/// positive) and sorted lexicographically.
inline std::vector<QVector> integer_kernel(const QMatrix& m) {
  if (!m.is_integral()) throw PreconditionError("integer_kernel needs an integral matrix");
  const std::size_t rows = m.rows(), n = m.cols();
  std::vector<std::vector<Integer>> a(rows, std::vector<Integer>(n));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = numerator_of(m(i, j));
  // u starts as the identity; column ops on a are mirrored on u.
  std::vector<std::vector<Integer>> u(n, std::vector<Integer>(n));
  for (std::size_t j = 0; j < n; ++j) u[j][j] = 1;
  auto col_op = [&](std::size_t j, std::size_t k, const Integer& p, const Integer& q,
                    const Integer& r, const Integer& s) {
    // (col_j, col_k) <- (p col_j + q col_k, r col_j + s col_k)
    for (std::size_t i = 0; i < rows; ++i) {
      Integer x = a[i][j], y = a[i][k];
      a[i][j] = p * x + q * y;
      a[i][k] = r * x + s * y;
    }
    for (std::size_t i = 0; i < n; ++i) {
      Integer x = u[i][j], y = u[i][k];
      u[i][j] = p * x + q * y;
      u[i][k] = r * x + s * y;
    }
  };
  std::size_t pivot_col = 0;
  for (std::size_t i = 0; i < rows && pivot_col < n; ++i) {
    for (std::size_t k = pivot_col + 1; k < n; ++k) {
      if (a[i][k] == 0) continue;
      Integer x = a[i][pivot_col], y = a[i][k];
      // extended gcd: g = p x + q y
      Integer old_r = x, r = y, old_s = 1, s = 0, old_t = 0, t = 1;
      while (r != 0) {
        Integer quo = old_r / r;
        Integer tmp = old_r - quo * r; old_r = r; r = tmp;
        tmp = old_s - quo * s; old_s = s; s = tmp;
        tmp = old_t - quo * t; old_t = t; t = tmp;
      }
      Integer g = old_r;
      Integer p = old_s, q = old_t;
      if (g < 0) { g = -g; p = -p; q = -q; }
      // new pivot column = p*col_piv + q*col_k has entry g; new col_k = (-y/g) col_piv + (x/g) col_k has entry 0.
      col_op(pivot_col, k, p, q, -y / g, x / g);
    }
    if (a[i][pivot_col] != 0) ++pivot_col;
  }
  std::vector<QVector> basis;
  for (std::size_t j = pivot_col; j < n; ++j) {
    QVector v(n);
    Integer g = 0;
    for (std::size_t i = 0; i < n; ++i) g = boost::multiprecision::gcd(g, u[i][j]);
    for (std::size_t i = 0; i < n; ++i) v[i] = Rational(g == 0 ? u[i][j] : u[i][j] / g);
    auto first = std::find_if(v.begin(), v.end(), [](const Rational& q) { return q != 0; });
    if (first != v.end() && *first < 0)
      for (auto& q : v) q = -q;
    basis.push_back(std::move(v));
  }
  std::sort(basis.begin(), basis.end(), [](const QVector& x, const QVector& y) {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(),
                                        [](const Rational& p, const Rational& q) { return p > q; });
  });
  return basis;
}

}  // namespace torusreal

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "toda/errors.hpp"
#include "toda/rational.hpp"

namespace toda {

/// Dense row-major matrix over a commutative ring T. T must be constructible
/// from int (0 and 1 are the additive and multiplicative identities).
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::size_t rows, std::size_t cols, const T& fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw Error("ragged matrix initializer");
      for (const auto& v : row) data_.push_back(v);
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) {
    for (auto& v : a.data_) v = -v;
    return a;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw Error("matrix shape mismatch in product");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (is_zero_entry(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Submatrix on the given row and column index lists.
  Matrix sub(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const {
    Matrix m(rs.size(), cs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < cs.size(); ++j) m(i, j) = (*this)(rs[i], cs[j]);
    return m;
  }

  template <class F>
  auto map(F&& f) const -> Matrix<decltype(f(std::declval<const T&>()))> {
    Matrix<decltype(f(std::declval<const T&>()))> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = f((*this)(i, j));
    return out;
  }

 private:
  static bool is_zero_entry(const T& v) { return v == T(0); }
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;
using RealMatrix = Matrix<double>;

inline double pivot_magnitude(const Rational& r) { return std::fabs(r.get_d()) + (sgn(r) != 0 ? 1.0 : 0.0); }
inline double pivot_magnitude(double v) { return std::fabs(v); }

namespace detail {

// Row echelon form in place; returns pivot columns. Exact types pick the
// first nonzero pivot of greatest magnitude, floating types use partial
// pivoting. `sign` tracks row swaps.
template <class T>
std::vector<std::size_t> echelon(Matrix<T>& m, int& sign, bool reduce = false) {
  std::vector<std::size_t> pivots;
  sign = 1;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t best = row;
    double best_mag = 0.0;
    for (std::size_t r = row; r < m.rows(); ++r) {
      double mag = pivot_magnitude(m(r, col));
      if (mag > best_mag) {
        best_mag = mag;
        best = r;
      }
    }
    if (best_mag == 0.0) continue;
    if (best != row) {
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(row, c), m(best, c));
      sign = -sign;
    }
    const T piv = m(row, col);
    for (std::size_t r = reduce ? 0 : row + 1; r < m.rows(); ++r) {
      if (r == row || m(r, col) == T(0)) continue;
      const T factor = m(r, col) / piv;
      for (std::size_t c = col; c < m.cols(); ++c) m(r, c) -= factor * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace detail

template <class T>
T determinant(Matrix<T> m) {
  if (!m.square()) throw Error("determinant of non-square matrix");
  int sign = 1;
  auto pivots = detail::echelon(m, sign);
  if (pivots.size() < m.rows()) return T(0);
  T det = T(sign);
  for (std::size_t i = 0; i < m.rows(); ++i) det *= m(i, i);
  return det;
}

template <class T>
std::size_t rank(Matrix<T> m) {
  int sign = 1;
  return detail::echelon(m, sign).size();
}

/// Inverse over a field; throws when singular.
template <class T>
Matrix<T> inverse(const Matrix<T>& m) {
  if (!m.square()) throw Error("inverse of non-square matrix");
  const std::size_t n = m.rows();
  Matrix<T> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = T(1);
  }
  int sign = 1;
  auto pivots = detail::echelon(aug, sign, true);
  if (pivots.size() < n || pivots[n - 1] != n - 1) throw Error("matrix is singular");
  Matrix<T> inv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const T d = aug(i, i);
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j) / d;
  }
  return inv;
}

/// Basis of the right null space {x : m x = 0}, one column vector per entry,
/// in reduced-row-echelon order of the free columns.
template <class T>
std::vector<std::vector<T>> nullspace(Matrix<T> m) {
  int sign = 1;
  auto pivots = detail::echelon(m, sign, true);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<T> v(m.cols(), T(0));
    v[free] = T(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, free) / m(r, pivots[r]);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Determinant of the submatrix on rows/cols.
template <class T>
T minor(const Matrix<T>& m, const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) {
  return determinant(m.sub(rs, cs));
}

/// k-th leading principal minor; the empty minor is 1.
template <class T>
T leading_minor(const Matrix<T>& m, std::size_t k) {
  if (k == 0) return T(1);
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  return minor(m, idx, idx);
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Matrix<T>& m) {
  os << "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
    os << "]";
  }
  return os << "]";
}

}  // namespace toda

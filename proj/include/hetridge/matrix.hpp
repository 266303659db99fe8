#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hetridge/errors.hpp"

namespace hetridge {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric square matrix. The full storage is kept and construction
/// verifies entries[i][j] == entries[j][i] exactly; nothing is ever
/// re-symmetrized behind the caller's back.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw DimensionMismatch("SymMatrix: matrix is not square");
    for (std::size_t i = 0; i < m_.rows(); ++i)
      for (std::size_t j = i + 1; j < m_.cols(); ++j)
        if (m_(i, j) != m_(j, i))
          throw DimensionMismatch("SymMatrix: entries are not exactly symmetric at (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");
  }

  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

  std::size_t order() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& dense() const { return m_; }

  /// A + diag(d); d.size() must equal order().
  SymMatrix with_added_diagonal(const Vector& d) const {
    if (d.size() != order())
      throw DimensionMismatch("with_added_diagonal: diagonal length mismatch");
    Matrix m = m_;
    for (std::size_t i = 0; i < order(); ++i) m(i, i) += d[i];
    return SymMatrix(std::move(m));
  }

  /// diag(s) * A * diag(s), filled symmetrically.
  SymMatrix scaled_by(const Vector& s) const {
    if (s.size() != order())
      throw DimensionMismatch("scaled_by: scale length mismatch");
    Matrix m(order(), order());
    for (std::size_t i = 0; i < order(); ++i)
      for (std::size_t j = i; j < order(); ++j) {
        const double v = s[i] * s[j] * m_(i, j);
        m(i, j) = v;
        m(j, i) = v;
      }
    return SymMatrix(std::move(m));
  }

 private:
  Matrix m_;
};

/// Strictly positive, finite diagonal weights.
class DiagWeights {
 public:
  explicit DiagWeights(Vector values) : values_(std::move(values)) {
    for (double v : values_)
      if (!(v > 0.0) || !std::isfinite(v))
        throw NonFiniteWeights("DiagWeights: entries must be finite and > 0");
  }

  static DiagWeights ones(std::size_t n) { return DiagWeights(Vector(n, 1.0)); }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const Vector& values() const { return values_; }

 private:
  Vector values_;
};

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

inline double inf_norm(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// A * x
inline Vector matvec(const Matrix& a, const Vector& x) {
  if (x.size() != a.cols()) throw DimensionMismatch("matvec: size mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* r = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

/// A^T * x
inline Vector matvec_transposed(const Matrix& a, const Vector& x) {
  if (x.size() != a.rows()) throw DimensionMismatch("matvec_transposed: size mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += r[j] * x[i];
  }
  return y;
}

}  // namespace hetridge

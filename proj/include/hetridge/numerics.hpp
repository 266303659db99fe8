#pragma once

#include "hetridge/matrix.hpp"

namespace hetridge {

/// Cholesky factorization A = L L^T of a symmetric positive definite matrix.
/// No pivoting: a non-positive pivot aborts with NotPositiveDefinite, which
/// in this codebase always signals a violated penalty or Gram precondition.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const SymMatrix& a);

  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;

  /// Cheap condition estimate (max(diag L)/min(diag L))^2. A value above
  /// 1e12 sets the ill-conditioned flag; callers may warn but solves proceed.
  double condition_estimate() const { return cond_; }
  bool ill_conditioned() const { return cond_ > 1e12; }

  std::size_t order() const { return l_.rows(); }

 private:
  Matrix l_;  // lower triangle; strict upper part is zero
  double cond_ = 1.0;
};

Vector solve_spd(const SymMatrix& a, const Vector& b);
Matrix solve_spd(const SymMatrix& a, const Matrix& b);

struct EigenExtremes {
  double min = 0.0;
  double max = 0.0;
};

/// Smallest and largest eigenvalue of a symmetric matrix via cyclic Jacobi
/// rotations. Intended for diagnostics at order <= a few hundred.
EigenExtremes eigen_extremes(const SymMatrix& a);

/// X^T diag(w) X, accumulated in fixed row blocks that are reduced in block
/// order, so the result is identical for any OpenMP thread count.
SymMatrix weighted_gram(const Matrix& x, const DiagWeights& w);
SymMatrix gram(const Matrix& x);

/// Straight single-loop accumulation kept as the reference implementation.
SymMatrix weighted_gram_serial(const Matrix& x, const DiagWeights& w);
SymMatrix gram_serial(const Matrix& x);

/// X^T diag(w) y with the same fixed-block reduction scheme.
Vector weighted_xty(const Matrix& x, const DiagWeights& w, const Vector& y);
Vector xty(const Matrix& x, const Vector& y);
Vector weighted_xty_serial(const Matrix& x, const DiagWeights& w, const Vector& y);

}  // namespace hetridge

#include "hetridge/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <omp.h>

namespace hetridge {

CholeskyFactor::CholeskyFactor(const SymMatrix& a) {
  const std::size_t n = a.order();
  l_ = Matrix(n, n);
  double dmin = 0.0, dmax = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = a(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= l_(j, k) * l_(j, k);
    if (!(s > 0.0) || !std::isfinite(s))
      throw NotPositiveDefinite("Cholesky: non-positive pivot at column " + std::to_string(j));
    const double d = std::sqrt(s);
    l_(j, j) = d;
    if (j == 0) {
      dmin = dmax = d;
    } else {
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= l_(i, k) * l_(j, k);
      l_(i, j) = t / d;
    }
  }
  cond_ = n == 0 ? 1.0 : (dmax / dmin) * (dmax / dmin);
}

Vector CholeskyFactor::solve(const Vector& b) const {
  const std::size_t n = order();
  if (b.size() != n) throw DimensionMismatch("CholeskyFactor::solve: rhs length mismatch");
  Vector x(b);
  // L z = b
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * x[k];
    x[i] = s / l_(i, i);
  }
  // L^T x = z
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * x[k];
    x[ii] = s / l_(ii, ii);
  }
  return x;
}

Matrix CholeskyFactor::solve(const Matrix& b) const {
  if (b.rows() != order()) throw DimensionMismatch("CholeskyFactor::solve: rhs rows mismatch");
  Matrix x(b.rows(), b.cols());
  Vector col(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    Vector sol = solve(col);
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = sol[i];
  }
  return x;
}

Vector solve_spd(const SymMatrix& a, const Vector& b) { return CholeskyFactor(a).solve(b); }
Matrix solve_spd(const SymMatrix& a, const Matrix& b) { return CholeskyFactor(a).solve(b); }

EigenExtremes eigen_extremes(const SymMatrix& a) {
  const std::size_t n = a.order();
  if (n == 0) return {0.0, 0.0};
  Matrix m = a.dense();

  auto off_norm = [&m, n]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * m(i, j) * m(i, j);
    return std::sqrt(s);
  };

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(i, j)));
  const double tol = (scale == 0.0 ? 1.0 : scale) * 1e-14 * static_cast<double>(n);

  const int max_sweeps = 64;
  int sweep = 0;
  while (off_norm() > tol) {
    if (++sweep > max_sweeps)
      throw ConvergenceFailure("eigen_extremes: Jacobi sweep budget exhausted");
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double app = m(p, p), aqq = m(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
    }
  }

  EigenExtremes e{m(0, 0), m(0, 0)};
  for (std::size_t i = 1; i < n; ++i) {
    e.min = std::min(e.min, m(i, i));
    e.max = std::max(e.max, m(i, i));
  }
  return e;
}

namespace {

constexpr std::size_t kBlockRows = 512;

// Packed upper triangle accumulation of one row block. w may be null (unit
// weights). Index of (j,k), k >= j, is j*p - j*(j-1)/2 + (k-j).
void accumulate_block(const Matrix& x, const double* w, std::size_t row_begin,
                      std::size_t row_end, double* acc) {
  const std::size_t p = x.cols();
  for (std::size_t i = row_begin; i < row_end; ++i) {
    const double* xi = x.row(i);
    const double wi = w ? w[i] : 1.0;
    double* a = acc;
    for (std::size_t j = 0; j < p; ++j) {
      const double wx = wi * xi[j];
      for (std::size_t k = j; k < p; ++k) *a++ += wx * xi[k];
    }
  }
}

SymMatrix unpack_upper(const Vector& acc, std::size_t p) {
  Matrix m(p, p);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = j; k < p; ++k) {
      m(j, k) = acc[idx];
      m(k, j) = acc[idx];
      ++idx;
    }
  return SymMatrix(std::move(m));
}

SymMatrix blocked_gram(const Matrix& x, const double* w) {
  const std::size_t n = x.rows(), p = x.cols();
  const std::size_t packed = p * (p + 1) / 2;
  const std::size_t nblocks = n == 0 ? 0 : (n + kBlockRows - 1) / kBlockRows;
  std::vector<Vector> partial(nblocks, Vector(packed, 0.0));
  // Same block arithmetic either way, so results are bit-identical. Nested
  // team creation would only serialize callers that are already parallel.
  if (omp_in_parallel()) {
    for (std::size_t b = 0; b < nblocks; ++b) {
      const std::size_t lo = b * kBlockRows;
      accumulate_block(x, w, lo, std::min(n, lo + kBlockRows), partial[b].data());
    }
  } else {
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kBlockRows;
      const std::size_t hi = std::min(n, lo + kBlockRows);
      accumulate_block(x, w, lo, hi, partial[static_cast<std::size_t>(b)].data());
    }
  }
  Vector acc(packed, 0.0);
  for (std::size_t b = 0; b < nblocks; ++b)
    for (std::size_t i = 0; i < packed; ++i) acc[i] += partial[b][i];
  return unpack_upper(acc, p);
}

Vector blocked_xty(const Matrix& x, const double* w, const Vector& y) {
  const std::size_t n = x.rows(), p = x.cols();
  const std::size_t nblocks = n == 0 ? 0 : (n + kBlockRows - 1) / kBlockRows;
  std::vector<Vector> partial(nblocks, Vector(p, 0.0));
  const auto block = [&](std::size_t b) {
    const std::size_t lo = b * kBlockRows;
    const std::size_t hi = std::min(n, lo + kBlockRows);
    Vector& acc = partial[b];
    for (std::size_t i = lo; i < hi; ++i) {
      const double* xi = x.row(i);
      const double wy = (w ? w[i] : 1.0) * y[i];
      for (std::size_t j = 0; j < p; ++j) acc[j] += xi[j] * wy;
    }
  };
  if (omp_in_parallel()) {
    for (std::size_t b = 0; b < nblocks; ++b) block(b);
  } else {
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b)
      block(static_cast<std::size_t>(b));
  }
  Vector acc(p, 0.0);
  for (std::size_t b = 0; b < nblocks; ++b)
    for (std::size_t j = 0; j < p; ++j) acc[j] += partial[b][j];
  return acc;
}

}  // namespace

SymMatrix weighted_gram(const Matrix& x, const DiagWeights& w) {
  if (w.size() != x.rows()) throw DimensionMismatch("weighted_gram: weight length != row count");
  return blocked_gram(x, w.values().data());
}

SymMatrix gram(const Matrix& x) { return blocked_gram(x, nullptr); }

SymMatrix weighted_gram_serial(const Matrix& x, const DiagWeights& w) {
  if (w.size() != x.rows()) throw DimensionMismatch("weighted_gram_serial: weight length != row count");
  const std::size_t p = x.cols();
  Vector acc(p * (p + 1) / 2, 0.0);
  accumulate_block(x, w.values().data(), 0, x.rows(), acc.data());
  return unpack_upper(acc, p);
}

SymMatrix gram_serial(const Matrix& x) {
  const std::size_t p = x.cols();
  Vector acc(p * (p + 1) / 2, 0.0);
  accumulate_block(x, nullptr, 0, x.rows(), acc.data());
  return unpack_upper(acc, p);
}

Vector weighted_xty(const Matrix& x, const DiagWeights& w, const Vector& y) {
  if (w.size() != x.rows() || y.size() != x.rows())
    throw DimensionMismatch("weighted_xty: length mismatch");
  return blocked_xty(x, w.values().data(), y);
}

Vector xty(const Matrix& x, const Vector& y) {
  if (y.size() != x.rows()) throw DimensionMismatch("xty: length mismatch");
  return blocked_xty(x, nullptr, y);
}

Vector weighted_xty_serial(const Matrix& x, const DiagWeights& w, const Vector& y) {
  if (w.size() != x.rows() || y.size() != x.rows())
    throw DimensionMismatch("weighted_xty_serial: length mismatch");
  const std::size_t p = x.cols();
  Vector acc(p, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* xi = x.row(i);
    const double wy = w[i] * y[i];
    for (std::size_t j = 0; j < p; ++j) acc[j] += xi[j] * wy;
  }
  return acc;
}

}  // namespace hetridge

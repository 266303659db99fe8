#include "hetridge/standardize.hpp"

#include <cmath>

namespace hetridge {

ColumnStats column_stats(const Matrix& m) {
  const std::size_t n = m.rows(), p = m.cols();
  if (n < 2) throw DimensionMismatch("column_stats: need at least two rows");
  ColumnStats s;
  s.mean.assign(p, 0.0);
  s.sd.assign(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = m.row(i);
    for (std::size_t j = 0; j < p; ++j) s.mean[j] += r[j];
  }
  for (std::size_t j = 0; j < p; ++j) s.mean[j] /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = m.row(i);
    for (std::size_t j = 0; j < p; ++j) {
      const double d = r[j] - s.mean[j];
      s.sd[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    s.sd[j] = std::sqrt(s.sd[j] / static_cast<double>(n - 1));
    if (s.sd[j] == 0.0)
      throw Error("column_stats: column " + std::to_string(j) + " is constant");
  }
  return s;
}

Matrix standardized(const Matrix& m, const ColumnStats& s) {
  if (s.mean.size() != m.cols()) throw DimensionMismatch("standardized: stats mismatch");
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* r = m.row(i);
    double* o = out.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) o[j] = (r[j] - s.mean[j]) / s.sd[j];
  }
  return out;
}

Matrix destandardized(const Matrix& m, const ColumnStats& s) {
  if (s.mean.size() != m.cols()) throw DimensionMismatch("destandardized: stats mismatch");
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* r = m.row(i);
    double* o = out.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) o[j] = r[j] * s.sd[j] + s.mean[j];
  }
  return out;
}

Matrix rows_subset(const Matrix& m, const std::vector<std::size_t>& idx) {
  Matrix out(idx.size(), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double* r = m.row(idx[i]);
    double* o = out.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) o[j] = r[j];
  }
  return out;
}

Vector subset(const Vector& v, const std::vector<std::size_t>& idx) {
  Vector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

}  // namespace hetridge

#include "hetridge/dataset.hpp"

#include <cmath>

namespace hetridge {

namespace {

bool has_zero_variance(const Matrix& z, std::size_t col) {
  const std::size_t n = z.rows();
  if (n < 2) return true;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += z(i, col);
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = z(i, col) - mean;
    ss += d * d;
  }
  return ss == 0.0;
}

}  // namespace

Dataset::Dataset(Vector y_in, Matrix x_in, Matrix z_in,
                 std::vector<std::string> x_names_in,
                 std::vector<std::string> z_names_in)
    : y(std::move(y_in)),
      x(std::move(x_in)),
      z(std::move(z_in)),
      x_names(std::move(x_names_in)),
      z_names(std::move(z_names_in)) {
  const std::size_t nn = y.size();
  if (x.rows() != nn || z.rows() != nn)
    throw DimensionMismatch("Dataset: X/Z row counts must match the response length");
  if (!x_names.empty() && x_names.size() != x.cols())
    throw DimensionMismatch("Dataset: x_names length mismatch");
  if (!z_names.empty() && z_names.size() != z.cols())
    throw DimensionMismatch("Dataset: z_names length mismatch");
  if (nn <= x.cols() || nn <= z.cols())
    throw DimensionMismatch("Dataset: requires n > p and n > q");
  for (double v : y)
    if (!std::isfinite(v)) throw MissingValue("Dataset: non-finite response value");
  for (double v : x.data())
    if (!std::isfinite(v)) throw MissingValue("Dataset: non-finite entry in X");
  for (double v : z.data())
    if (!std::isfinite(v)) throw MissingValue("Dataset: non-finite entry in Z");
  for (std::size_t j = 0; j < z.cols(); ++j)
    if (has_zero_variance(z, j)) {
      const std::string name = z_names.empty() ? std::to_string(j) : z_names[j];
      throw ConstantVarianceColumn(
          "Dataset: variance-design column '" + name +
          "' is constant; the intercept of the log-variance model is estimated "
          "internally and a constant column makes it unidentifiable");
    }
}

AugmentedVarianceDesign::AugmentedVarianceDesign(const Matrix& z) {
  zstar = Matrix(z.rows(), z.cols() + 1);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    double* out = zstar.row(i);
    const double* in = z.row(i);
    for (std::size_t j = 0; j < z.cols(); ++j) out[j] = in[j];
    out[z.cols()] = 1.0;
  }
}

}  // namespace hetridge

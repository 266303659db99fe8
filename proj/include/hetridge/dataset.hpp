#pragma once

#include <string>
#include <vector>

#include "hetridge/matrix.hpp"

namespace hetridge {

/// Response plus mean design X (n x p) and variance design Z (n x q).
/// Z must not contain a constant column: the log-variance regression carries
/// its own intercept slot, and a second one is not identifiable.
struct Dataset {
  Vector y;
  Matrix x;
  Matrix z;
  std::vector<std::string> x_names;  // optional, may be empty
  std::vector<std::string> z_names;

  Dataset(Vector y_in, Matrix x_in, Matrix z_in,
          std::vector<std::string> x_names_in = {},
          std::vector<std::string> z_names_in = {});

  std::size_t n() const { return y.size(); }
  std::size_t p() const { return x.cols(); }
  std::size_t q() const { return z.cols(); }
};

/// Z* = (Z, 1_n): the variance design with a trailing all-ones column so the
/// nuisance expectation of log(eps^2) is estimable.
struct AugmentedVarianceDesign {
  Matrix zstar;

  explicit AugmentedVarianceDesign(const Matrix& z);

  std::size_t cols() const { return zstar.cols(); }
};

}  // namespace hetridge

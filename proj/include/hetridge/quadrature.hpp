#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

#include "hetridge/errors.hpp"

namespace hetridge {

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
/// Throws QuadratureFailure when the recursion budget runs out.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 60);

}  // namespace hetridge

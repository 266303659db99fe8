#pragma once

#include <stdexcept>

namespace hetridge {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
struct NonFiniteWeights : Error { using Error::Error; };
// Direct-mode adaptive weight 1/x^2 requested for an exactly-zero previous
// estimate. Ridge iterates are nonzero almost surely, so this indicates
// upstream misuse rather than a condition to silently work around.
struct ZeroCoefficient : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct InvalidFolds : Error { using Error::Error; };
struct AllPointsFailed : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct MissingValue : Error { using Error::Error; };
struct ConstantVarianceColumn : Error { using Error::Error; };
struct SchemaMismatch : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace hetridge

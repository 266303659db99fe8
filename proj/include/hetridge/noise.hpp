#pragma once

#include <string>

#include "hetridge/matrix.hpp"
#include "hetridge/rng.hpp"

namespace hetridge {

enum class NoiseFamily { standard_normal, laplace, student_t3 };

/// Noise specification. standardize_variance rescales draws to unit variance
/// (Laplace(0,1) has variance 2, t(3) has variance 3); the default keeps the
/// raw families.
struct NoiseKind {
  NoiseFamily family = NoiseFamily::standard_normal;
  bool standardize_variance = false;

  /// Standard deviation of the unstandardized family.
  double family_sd() const;

  /// Density of a draw from this kind (after standardization if enabled).
  double density(double x) const;

  /// Quantile function of this kind, used for QQ reference values.
  double quantile(double prob) const;

  std::string name() const;
};

NoiseKind parse_noise_family(const std::string& name, bool standardize);

Vector draw_noise(const NoiseKind& kind, std::size_t n, RngStream& stream);

/// E[log(eps^2)] for the given kind, by adaptive quadrature against the
/// density (absolute tolerance well inside 1e-3).
double compute_c0(const NoiseKind& kind);

double normal_quantile(double prob);

}  // namespace hetridge

#include "hetridge/noise.hpp"

#include <cmath>

#include "hetridge/quadrature.hpp"

namespace hetridge {

namespace {

constexpr double kPi = 3.14159265358979323846;

double normal_density(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

double laplace_density(double x) { return 0.5 * std::exp(-std::abs(x)); }

double t3_density(double x) {
  const double u = 1.0 + x * x / 3.0;
  return 2.0 / (kPi * std::sqrt(3.0) * u * u);
}

double t3_cdf(double x) {
  const double t = x / std::sqrt(3.0);
  return 0.5 + (std::atan(t) + t / (1.0 + t * t)) / kPi;
}

double t3_quantile(double prob) {
  double lo = -1e8, hi = 1e8;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (t3_cdf(mid) < prob ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double laplace_quantile(double prob) {
  return prob < 0.5 ? std::log(2.0 * prob) : -std::log(2.0 * (1.0 - prob));
}

}  // namespace

double normal_quantile(double prob) {
  // Acklam's rational approximation plus one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p = prob;
  const double plow = 0.02425, phigh = 1.0 - plow;
  double x;
  if (p < plow) {
    const double u = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else if (p <= phigh) {
    const double u = p - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double u = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double NoiseKind::family_sd() const {
  switch (family) {
    case NoiseFamily::standard_normal: return 1.0;
    case NoiseFamily::laplace: return std::sqrt(2.0);
    case NoiseFamily::student_t3: return std::sqrt(3.0);
  }
  return 1.0;
}

double NoiseKind::density(double x) const {
  const double s = standardize_variance ? family_sd() : 1.0;
  const double xs = x * s;
  double base = 0.0;
  switch (family) {
    case NoiseFamily::standard_normal: base = normal_density(xs); break;
    case NoiseFamily::laplace: base = laplace_density(xs); break;
    case NoiseFamily::student_t3: base = t3_density(xs); break;
  }
  return base * s;
}

double NoiseKind::quantile(double prob) const {
  double qv = 0.0;
  switch (family) {
    case NoiseFamily::standard_normal: qv = normal_quantile(prob); break;
    case NoiseFamily::laplace: qv = laplace_quantile(prob); break;
    case NoiseFamily::student_t3: qv = t3_quantile(prob); break;
  }
  return standardize_variance ? qv / family_sd() : qv;
}

std::string NoiseKind::name() const {
  std::string base;
  switch (family) {
    case NoiseFamily::standard_normal: base = "standard_normal"; break;
    case NoiseFamily::laplace: base = "laplace"; break;
    case NoiseFamily::student_t3: base = "student_t3"; break;
  }
  if (standardize_variance) base += "_unitvar";
  return base;
}

NoiseKind parse_noise_family(const std::string& name, bool standardize) {
  if (name == "standard_normal" || name == "normal")
    return {NoiseFamily::standard_normal, standardize};
  if (name == "laplace") return {NoiseFamily::laplace, standardize};
  if (name == "student_t3" || name == "t3") return {NoiseFamily::student_t3, standardize};
  throw ConfigError("unknown noise family: " + name);
}

Vector draw_noise(const NoiseKind& kind, std::size_t n, RngStream& stream) {
  Vector out(n);
  const double scale = kind.standardize_variance ? 1.0 / kind.family_sd() : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    switch (kind.family) {
      case NoiseFamily::standard_normal: v = stream.normal(); break;
      case NoiseFamily::laplace: v = stream.laplace(); break;
      case NoiseFamily::student_t3: v = stream.student_t3(); break;
    }
    out[i] = v * scale;
  }
  return out;
}

double compute_c0(const NoiseKind& kind) {
  // E[log(eps^2)] = 2 * integral of log(x^2) f(x) dx over x > 0 for these
  // symmetric families. Substituting x = e^u turns the logarithmic endpoint
  // into a smooth, double-exponentially decaying integrand:
  //   4 * integral of u * f(e^u) * e^u du over the real line.
  const auto integrand = [&kind](double u) {
    const double x = std::exp(u);
    return u * kind.density(x) * x;
  };
  return 4.0 * adaptive_simpson(integrand, -60.0, 40.0, 1e-7);
}

}  // namespace hetridge

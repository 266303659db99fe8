#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hetridge/dataset.hpp"
#include "hetridge/numerics.hpp"

namespace hetridge {

/// How the adaptive weight matrices diag(1/coef^2) are handled numerically.
///  - direct:    form the weights literally; exact zeros in the previous
///               estimate are an error.
///  - rescaled:  fold |previous| into the design columns so nothing is ever
///               divided; exact zeros stay zero. The default.
///  - perturbed: use 1/(coef^2 + delta) at the cost of a little bias.
enum class Stabilization { direct, rescaled, perturbed };

std::string to_string(Stabilization mode);
Stabilization stabilization_from_string(const std::string& name);

/// The four diagonal tuning matrices: initial-ridge penalties (psi for the
/// mean, omega for the augmented variance regression) and adaptive penalties
/// (lambda, gamma). Sizes p, q+1, p, q+1.
struct TuningSchedule {
  Vector psi;
  Vector omega;
  Vector lambda;
  Vector gamma;

  static TuningSchedule scalars(std::size_t p, std::size_t q, double psi_value,
                                double omega_value, double lambda_value,
                                double gamma_value);

  /// psi = omega = sqrt(n), lambda = gamma = 0.1 * ln(n): the rates under
  /// which the initial estimates stay unbiased while the adaptive penalties
  /// diverge slowly enough to keep the iterates tight.
  static TuningSchedule rate_default(std::size_t n, std::size_t p, std::size_t q);

  void validate(std::size_t p, std::size_t q) const;
};

/// Current (alpha, beta*) pair. beta_star holds the q variance coefficients
/// followed by the estimate of c0 = E[log(eps^2)]. iteration counts completed
/// update pairs; 0 is the initial ridge pair.
struct EstimatorState {
  Vector alpha;
  Vector beta_star;
  int iteration = 0;

  std::size_t q() const { return beta_star.size() - 1; }
  double c0_hat() const { return beta_star.back(); }
  /// The first q entries of beta_star.
  Vector beta() const { return Vector(beta_star.begin(), beta_star.end() - 1); }
};

struct FitOptions {
  int k = 0;
  bool bar = false;
  Stabilization stabilization = Stabilization::rescaled;
  double delta_alpha = 1e-6;
  double delta_beta = 1e-6;
  double bar_tolerance = 1e-10;
  int bar_max_iterations = 500;
  double divergence_bound = 1e8;

  static FitOptions ar(int k_in) {
    FitOptions o;
    o.k = k_in;
    return o;
  }
  static FitOptions bar_mode() {
    FitOptions o;
    o.bar = true;
    return o;
  }
};

struct FitResult {
  EstimatorState final;
  std::vector<EstimatorState> trajectory;  // one entry per iteration, from 0
  bool converged = false;                  // meaningful in BAR mode only
  /// (mean sub-problem, variance sub-problem) penalized objective values at
  /// the returned minimizers, one pair per trajectory entry.
  std::vector<std::pair<double, double>> objective_values;
  /// Some solve had an estimated condition number above 1e12 (tiny adaptive
  /// weights or a near-degenerate design); results may be inaccurate.
  bool condition_warning = false;
};

/// (X^T X + Psi)^{-1} X^T Y. Every step below sets *ill_conditioned (when
/// given) if its solve's condition estimate exceeds 1e12.
Vector ridge_alpha_init(const Dataset& d, const Vector& psi,
                        bool* ill_conditioned = nullptr);

/// Componentwise log((Y_i - X_i^T alpha)^2). Residual magnitudes below
/// kResidualFloor are clamped so exact floating-point zeros stay finite.
constexpr double kResidualFloor = 1e-150;
Vector log_sq_residuals(const Dataset& d, const Vector& alpha);

/// (Z*^T Z* + Omega*)^{-1} Z*^T L_n(alpha); the last slot estimates c0.
Vector ridge_beta_init(const Dataset& d, const Vector& alpha, const Vector& omega,
                       bool* ill_conditioned = nullptr);

/// One adaptive mean update: weighted ridge with weights exp(-Z_i beta) and
/// penalty lambda_j / alpha_prev_j^2.
Vector ar_alpha_step(const Dataset& d, const EstimatorState& prev, const Vector& lambda,
                     Stabilization mode, double delta_alpha = 1e-6,
                     bool* ill_conditioned = nullptr);

/// One adaptive variance update against L_n(alpha) with penalty
/// gamma_j / beta_star_prev_j^2 (the c0 slot participates).
Vector ar_beta_step(const Dataset& d, const Vector& alpha, const Vector& prev_beta_star,
                    const Vector& gamma, Stabilization mode, double delta_beta = 1e-6,
                    bool* ill_conditioned = nullptr);

/// Fixed-k alternation: initial ridge pair, then k (alpha, beta*) updates.
FitResult ar_fit(const Dataset& d, const TuningSchedule& t, const FitOptions& opts);

/// Iterate update pairs until the concatenated state moves less than
/// bar_tolerance (converged) or the iteration/divergence guards trip.
FitResult bar_fit(const Dataset& d, const TuningSchedule& t, const FitOptions& opts);

struct Predictions {
  Vector mean;
  Vector variance;
};

/// mean = Xnew alpha, variance = exp(Znew beta) per row (c0 excluded).
Predictions predict(const EstimatorState& state, const Matrix& xnew, const Matrix& znew);

struct Support {
  std::vector<std::size_t> alpha_support;
  std::vector<std::size_t> beta_support;  // c0 slot never reported
};

/// 0-based indices with |coefficient| > threshold.
Support support(const EstimatorState& state, double threshold);

struct AssumptionReport {
  EigenExtremes x_gram;      // eigen extremes of X^T X / n
  EigenExtremes zstar_gram;  // eigen extremes of Z*^T Z* / n
  double max_row_norm_x = 0.0;
  double max_row_norm_zstar = 0.0;
  bool x_near_singular = false;
  bool zstar_near_singular = false;
};

AssumptionReport assumption_diagnostics(const Dataset& d);

/// Penalized objective evaluated at an arbitrary point; the minimizers
/// returned by the step functions minimize exactly these.
double ridge_alpha_objective(const Dataset& d, const Vector& psi, const Vector& alpha);
double ridge_beta_objective(const Dataset& d, const Vector& alpha, const Vector& omega,
                            const Vector& beta_star);
double ar_alpha_objective(const Dataset& d, const EstimatorState& prev,
                          const Vector& lambda, Stabilization mode, double delta_alpha,
                          const Vector& alpha);
double ar_beta_objective(const Dataset& d, const Vector& alpha,
                         const Vector& prev_beta_star, const Vector& gamma,
                         Stabilization mode, double delta_beta, const Vector& beta_star);

}  // namespace hetridge

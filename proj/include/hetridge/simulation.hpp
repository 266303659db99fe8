#pragma once

#include <optional>
#include <string>

#include "hetridge/estimator.hpp"
#include "hetridge/noise.hpp"
#include "hetridge/rng.hpp"

namespace hetridge {

/// AR with a fixed iteration count, or BAR.
struct EstimatorChoice {
  bool bar = false;
  int k = 0;

  std::string name() const { return bar ? "bar" : "k=" + std::to_string(k); }
};

struct ScalarTuning {
  double psi = 0.0;
  double omega = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
};

/// One Monte-Carlo scenario: equicorrelated Gaussian designs, sparse ramp
/// signals, a noise family, and the estimators to fit per trial.
struct SimulationSpec {
  std::size_t n = 1000;
  std::size_t p = 20;
  std::size_t q = 20;
  double rho = 0.4;
  Vector alpha0;
  Vector beta0;
  NoiseKind noise;
  std::size_t trials = 200;
  std::uint64_t master_seed = 1;
  std::vector<EstimatorChoice> estimators;
  /// Scalar-times-identity override; absent means TuningSchedule::rate_default.
  std::optional<ScalarTuning> tuning;
  FitOptions fit_options;  // k/bar are overridden per estimator
  std::string label;

  /// (0.1, 0.2, ..., 1.0, 0, ..., 0) truncated or zero-padded to dim.
  static Vector ramp_signal(std::size_t dim);

  /// n=1000, p=q=20, rho=0.4, ramp signals, standard normal noise.
  static SimulationSpec defaults();

  TuningSchedule schedule() const;
  std::vector<std::size_t> alpha_zero_set() const;
  std::vector<std::size_t> alpha_nonzero_set() const;
  Vector beta_star_truth(double c0) const;
};

Matrix equicorrelated_gaussian(std::size_t n, std::size_t dim, double rho,
                               RngStream& stream);

Dataset gen_dataset(const SimulationSpec& spec, std::size_t trial_index);

struct TrialResult {
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  std::vector<std::optional<FitResult>> fits;  // one slot per estimator
  std::vector<std::string> errors;             // empty string when the fit succeeded
};

/// Runs every trial (OpenMP across trials, one RNG stream set per trial) and
/// fits every requested estimator. Per-trial failures are recorded, never
/// fatal. Results are indexed by trial, so aggregation does not depend on
/// execution order or worker count.
std::vector<TrialResult> run_trials(const SimulationSpec& spec);

/// A fit counts as failed if it errored or if BAR did not converge.
bool fit_failed(const TrialResult& trial, std::size_t est,
                const std::vector<EstimatorChoice>& estimators);

std::size_t count_failures(const std::vector<TrialResult>& results, std::size_t est,
                           const SimulationSpec& spec);

enum class Block { alpha, beta_star };

/// Final coefficient vectors of the successful fits for one estimator.
std::vector<Vector> collect_estimates(const std::vector<TrialResult>& results,
                                      std::size_t est, const SimulationSpec& spec,
                                      Block block);

/// One component across trials (successful fits only).
Vector component_values(const std::vector<TrialResult>& results, std::size_t est,
                        const SimulationSpec& spec, Block block, std::size_t index);

struct MseSplitPair {
  double nonsparse = 0.0;
  double sparse = 0.0;
};

/// Mean squared error averaged over trials and components, split by the
/// truth's nonzero/zero blocks.
MseSplitPair mse_split(const std::vector<Vector>& estimates, const Vector& truth);

/// Median of |estimate| over all (trial, zero-index) pairs.
double median_abs_sparse(const std::vector<Vector>& estimates,
                         const std::vector<std::size_t>& zero_set);

struct FpFnRates {
  double fn_alpha = 0.0;
  double fp_alpha = 0.0;
  double fn_beta = 0.0;
  double fp_beta = 0.0;
};

/// FN: truly nonzero coefficient estimated at or below the threshold.
/// FP: truly zero coefficient estimated above it. Percentages; the c0 slot
/// is excluded from the beta side.
FpFnRates fp_fn_rates(const std::vector<Vector>& alpha_estimates,
                      const std::vector<Vector>& beta_star_estimates,
                      const Vector& alpha0, const Vector& beta_star0, double threshold);

/// Share of trials whose estimate of one truly-nonzero component falls at or
/// below the threshold, in percent.
double misidentification_rate(const std::vector<Vector>& estimates,
                              std::size_t component_index, double threshold);

/// Per-trial ||alpha_zero_block(k+1)|| / ||alpha_zero_block(k)|| from the
/// fit trajectories (requires a fixed-k fit with k > ratio_at).
Vector sparse_shrink_ratios(const std::vector<TrialResult>& results, std::size_t est,
                            const std::vector<std::size_t>& zero_set, int ratio_at);

struct AggregateMetrics {
  double mse_alpha_nonsparse = 0.0;
  double mse_alpha_sparse = 0.0;
  double mse_beta_nonsparse = 0.0;
  double mse_beta_sparse = 0.0;
  double median_abs_sparse_alpha = 0.0;
  double median_abs_sparse_beta = 0.0;
  double misident_alpha1 = 0.0;
  double misident_beta1 = 0.0;
  double fn_alpha = 0.0;
  double fp_alpha = 0.0;
  double fn_beta = 0.0;
  double fp_beta = 0.0;
  std::size_t failures = 0;
  std::size_t used_trials = 0;
};

AggregateMetrics aggregate_metrics(const std::vector<TrialResult>& results,
                                   std::size_t est, const SimulationSpec& spec,
                                   double c0, double threshold);

}  // namespace hetridge

#include "hetridge/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "hetridge/stats.hpp"

namespace hetridge {

Vector SimulationSpec::ramp_signal(std::size_t dim) {
  Vector v(dim, 0.0);
  for (std::size_t j = 0; j < std::min<std::size_t>(dim, 10); ++j)
    v[j] = 0.1 * static_cast<double>(j + 1);
  return v;
}

SimulationSpec SimulationSpec::defaults() {
  SimulationSpec s;
  s.alpha0 = ramp_signal(s.p);
  s.beta0 = ramp_signal(s.q);
  s.estimators = {{false, 0}, {false, 2}, {false, 5}, {false, 10}, {true, 0}};
  return s;
}

TuningSchedule SimulationSpec::schedule() const {
  if (tuning)
    return TuningSchedule::scalars(p, q, tuning->psi, tuning->omega, tuning->lambda,
                                   tuning->gamma);
  return TuningSchedule::rate_default(n, p, q);
}

std::vector<std::size_t> SimulationSpec::alpha_zero_set() const {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < alpha0.size(); ++j)
    if (alpha0[j] == 0.0) s.push_back(j);
  return s;
}

std::vector<std::size_t> SimulationSpec::alpha_nonzero_set() const {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < alpha0.size(); ++j)
    if (alpha0[j] != 0.0) s.push_back(j);
  return s;
}

Vector SimulationSpec::beta_star_truth(double c0) const {
  Vector v = beta0;
  v.push_back(c0);
  return v;
}

Matrix equicorrelated_gaussian(std::size_t n, std::size_t dim, double rho,
                               RngStream& stream) {
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("equicorrelated_gaussian: rho in [0,1)");
  // Sigma = (1-rho) I + rho 11^T has eigenvalues 1-rho and 1+(dim-1)rho, so
  // Sigma^{1/2} = a I + b 11^T with the constants below; a row is a*g + b*sum(g).
  const double a = std::sqrt(1.0 - rho);
  const double b =
      dim == 0 ? 0.0
               : (std::sqrt(1.0 + (static_cast<double>(dim) - 1.0) * rho) - a) /
                     static_cast<double>(dim);
  Matrix m(n, dim);
  Vector g(dim);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      g[j] = stream.normal();
      sum += g[j];
    }
    double* row = m.row(i);
    for (std::size_t j = 0; j < dim; ++j) row[j] = a * g[j] + b * sum;
  }
  return m;
}

Dataset gen_dataset(const SimulationSpec& spec, std::size_t trial_index) {
  if (spec.alpha0.size() != spec.p || spec.beta0.size() != spec.q)
    throw DimensionMismatch("gen_dataset: signal lengths must match p and q");
  RngStream sx(spec.master_seed, trial_index, StreamPurpose::mean_design);
  RngStream sz(spec.master_seed, trial_index, StreamPurpose::variance_design);
  RngStream se(spec.master_seed, trial_index, StreamPurpose::noise);
  Matrix x = equicorrelated_gaussian(spec.n, spec.p, spec.rho, sx);
  Matrix z = equicorrelated_gaussian(spec.n, spec.q, spec.rho, sz);
  const Vector eps = draw_noise(spec.noise, spec.n, se);
  Vector y(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double* xi = x.row(i);
    const double* zi = z.row(i);
    double mean = 0.0, zb = 0.0;
    for (std::size_t j = 0; j < spec.p; ++j) mean += xi[j] * spec.alpha0[j];
    for (std::size_t j = 0; j < spec.q; ++j) zb += zi[j] * spec.beta0[j];
    y[i] = mean + std::exp(0.5 * zb) * eps[i];
  }
  return Dataset(std::move(y), std::move(x), std::move(z));
}

std::vector<TrialResult> run_trials(const SimulationSpec& spec) {
  if (spec.estimators.empty()) throw ConfigError("run_trials: no estimators requested");
  const TuningSchedule schedule = spec.schedule();
  std::vector<TrialResult> results(spec.trials);
#pragma omp parallel for schedule(dynamic)
  for (long long ti = 0; ti < static_cast<long long>(spec.trials); ++ti) {
    const std::size_t t = static_cast<std::size_t>(ti);
    TrialResult& out = results[t];
    out.trial_index = t;
    out.seed = stream_seed(spec.master_seed, t, StreamPurpose::noise);
    out.fits.resize(spec.estimators.size());
    out.errors.resize(spec.estimators.size());
    try {
      const Dataset d = gen_dataset(spec, t);
      for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
        FitOptions opts = spec.fit_options;
        opts.bar = spec.estimators[e].bar;
        opts.k = spec.estimators[e].k;
        try {
          out.fits[e] = opts.bar ? bar_fit(d, schedule, opts) : ar_fit(d, schedule, opts);
        } catch (const Error& err) {
          out.errors[e] = err.what();
        }
      }
    } catch (const Error& err) {
      for (std::size_t e = 0; e < spec.estimators.size(); ++e)
        out.errors[e] = std::string("dataset generation: ") + err.what();
    }
  }
  return results;
}

bool fit_failed(const TrialResult& trial, std::size_t est,
                const std::vector<EstimatorChoice>& estimators) {
  if (!trial.fits[est].has_value()) return true;
  if (estimators[est].bar && !trial.fits[est]->converged) return true;
  return false;
}

std::size_t count_failures(const std::vector<TrialResult>& results, std::size_t est,
                           const SimulationSpec& spec) {
  std::size_t c = 0;
  for (const TrialResult& t : results)
    if (fit_failed(t, est, spec.estimators)) ++c;
  return c;
}

std::vector<Vector> collect_estimates(const std::vector<TrialResult>& results,
                                      std::size_t est, const SimulationSpec& spec,
                                      Block block) {
  std::vector<Vector> out;
  out.reserve(results.size());
  for (const TrialResult& t : results) {
    if (fit_failed(t, est, spec.estimators)) continue;
    const EstimatorState& s = t.fits[est]->final;
    out.push_back(block == Block::alpha ? s.alpha : s.beta_star);
  }
  return out;
}

Vector component_values(const std::vector<TrialResult>& results, std::size_t est,
                        const SimulationSpec& spec, Block block, std::size_t index) {
  Vector out;
  for (const TrialResult& t : results) {
    if (fit_failed(t, est, spec.estimators)) continue;
    const EstimatorState& s = t.fits[est]->final;
    out.push_back(block == Block::alpha ? s.alpha[index] : s.beta_star[index]);
  }
  return out;
}

MseSplitPair mse_split(const std::vector<Vector>& estimates, const Vector& truth) {
  MseSplitPair out;
  std::size_t n_nonsparse = 0, n_sparse = 0;
  for (const Vector& est : estimates) {
    if (est.size() != truth.size()) throw DimensionMismatch("mse_split: length mismatch");
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const double d = est[j] - truth[j];
      if (truth[j] != 0.0) {
        out.nonsparse += d * d;
        ++n_nonsparse;
      } else {
        out.sparse += d * d;
        ++n_sparse;
      }
    }
  }
  if (n_nonsparse > 0) out.nonsparse /= static_cast<double>(n_nonsparse);
  if (n_sparse > 0) out.sparse /= static_cast<double>(n_sparse);
  return out;
}

double median_abs_sparse(const std::vector<Vector>& estimates,
                         const std::vector<std::size_t>& zero_set) {
  if (zero_set.empty()) throw DimensionMismatch("median_abs_sparse: empty zero set");
  Vector values;
  values.reserve(estimates.size() * zero_set.size());
  for (const Vector& est : estimates)
    for (std::size_t j : zero_set) values.push_back(std::abs(est[j]));
  return median_of(std::move(values));
}

namespace {

std::pair<double, double> fn_fp_for_block(const std::vector<Vector>& estimates,
                                          const Vector& truth, std::size_t ncoef,
                                          double threshold) {
  std::size_t fn = 0, fn_total = 0, fp = 0, fp_total = 0;
  for (const Vector& est : estimates) {
    for (std::size_t j = 0; j < ncoef; ++j) {
      const bool selected = std::abs(est[j]) > threshold;
      if (truth[j] != 0.0) {
        ++fn_total;
        if (!selected) ++fn;
      } else {
        ++fp_total;
        if (selected) ++fp;
      }
    }
  }
  const auto pct = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  return {pct(fn, fn_total), pct(fp, fp_total)};
}

}  // namespace

FpFnRates fp_fn_rates(const std::vector<Vector>& alpha_estimates,
                      const std::vector<Vector>& beta_star_estimates,
                      const Vector& alpha0, const Vector& beta_star0, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("fp_fn_rates: threshold must be > 0");
  FpFnRates r;
  std::tie(r.fn_alpha, r.fp_alpha) =
      fn_fp_for_block(alpha_estimates, alpha0, alpha0.size(), threshold);
  // c0 occupies the trailing slot and is not a selectable predictor.
  std::tie(r.fn_beta, r.fp_beta) =
      fn_fp_for_block(beta_star_estimates, beta_star0, beta_star0.size() - 1, threshold);
  return r;
}

double misidentification_rate(const std::vector<Vector>& estimates,
                              std::size_t component_index, double threshold) {
  if (estimates.empty()) return 0.0;
  std::size_t miss = 0;
  for (const Vector& est : estimates)
    if (std::abs(est[component_index]) <= threshold) ++miss;
  return 100.0 * static_cast<double>(miss) / static_cast<double>(estimates.size());
}

Vector sparse_shrink_ratios(const std::vector<TrialResult>& results, std::size_t est,
                            const std::vector<std::size_t>& zero_set, int ratio_at) {
  Vector out;
  for (const TrialResult& t : results) {
    if (!t.fits[est].has_value()) continue;
    const auto& traj = t.fits[est]->trajectory;
    if (static_cast<int>(traj.size()) <= ratio_at + 1) continue;
    const auto block_norm = [&zero_set](const EstimatorState& s) {
      double acc = 0.0;
      for (std::size_t j : zero_set) acc += s.alpha[j] * s.alpha[j];
      return std::sqrt(acc);
    };
    const double denom = block_norm(traj[static_cast<std::size_t>(ratio_at)]);
    const double numer = block_norm(traj[static_cast<std::size_t>(ratio_at) + 1]);
    if (denom > 0.0) out.push_back(numer / denom);
  }
  return out;
}

AggregateMetrics aggregate_metrics(const std::vector<TrialResult>& results,
                                   std::size_t est, const SimulationSpec& spec,
                                   double c0, double threshold) {
  AggregateMetrics m;
  const std::vector<Vector> alphas = collect_estimates(results, est, spec, Block::alpha);
  const std::vector<Vector> betas = collect_estimates(results, est, spec, Block::beta_star);
  m.failures = count_failures(results, est, spec);
  m.used_trials = alphas.size();
  if (alphas.empty()) return m;

  const Vector beta_truth = spec.beta_star_truth(c0);
  const MseSplitPair ma = mse_split(alphas, spec.alpha0);
  const MseSplitPair mb = mse_split(betas, beta_truth);
  m.mse_alpha_nonsparse = ma.nonsparse;
  m.mse_alpha_sparse = ma.sparse;
  m.mse_beta_nonsparse = mb.nonsparse;
  m.mse_beta_sparse = mb.sparse;

  const std::vector<std::size_t> alpha_zero = spec.alpha_zero_set();
  std::vector<std::size_t> beta_zero;
  for (std::size_t j = 0; j < spec.beta0.size(); ++j)
    if (spec.beta0[j] == 0.0) beta_zero.push_back(j);
  if (!alpha_zero.empty()) m.median_abs_sparse_alpha = median_abs_sparse(alphas, alpha_zero);
  if (!beta_zero.empty()) m.median_abs_sparse_beta = median_abs_sparse(betas, beta_zero);

  if (!spec.alpha0.empty() && spec.alpha0[0] != 0.0)
    m.misident_alpha1 = misidentification_rate(alphas, 0, threshold);
  if (!spec.beta0.empty() && spec.beta0[0] != 0.0)
    m.misident_beta1 = misidentification_rate(betas, 0, threshold);

  const FpFnRates r = fp_fn_rates(alphas, betas, spec.alpha0, beta_truth, threshold);
  m.fn_alpha = r.fn_alpha;
  m.fp_alpha = r.fp_alpha;
  m.fn_beta = r.fn_beta;
  m.fp_beta = r.fp_beta;
  return m;
}

}  // namespace hetridge

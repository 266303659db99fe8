#include "hetridge/estimator.hpp"

#include <cmath>
#include <limits>

namespace hetridge {

std::string to_string(Stabilization mode) {
  switch (mode) {
    case Stabilization::direct: return "direct";
    case Stabilization::rescaled: return "rescaled";
    case Stabilization::perturbed: return "perturbed";
  }
  return "rescaled";
}

Stabilization stabilization_from_string(const std::string& name) {
  if (name == "direct") return Stabilization::direct;
  if (name == "rescaled") return Stabilization::rescaled;
  if (name == "perturbed") return Stabilization::perturbed;
  throw ConfigError("unknown stabilization mode: " + name);
}

TuningSchedule TuningSchedule::scalars(std::size_t p, std::size_t q, double psi_value,
                                       double omega_value, double lambda_value,
                                       double gamma_value) {
  TuningSchedule t;
  t.psi.assign(p, psi_value);
  t.omega.assign(q + 1, omega_value);
  t.lambda.assign(p, lambda_value);
  t.gamma.assign(q + 1, gamma_value);
  t.validate(p, q);
  return t;
}

TuningSchedule TuningSchedule::rate_default(std::size_t n, std::size_t p, std::size_t q) {
  const double root_n = std::sqrt(static_cast<double>(n));
  const double slow = 0.1 * std::log(static_cast<double>(n));
  return scalars(p, q, root_n, root_n, slow, slow);
}

void TuningSchedule::validate(std::size_t p, std::size_t q) const {
  if (psi.size() != p || lambda.size() != p)
    throw DimensionMismatch("TuningSchedule: psi/lambda must have length p");
  if (omega.size() != q + 1 || gamma.size() != q + 1)
    throw DimensionMismatch("TuningSchedule: omega/gamma must have length q+1");
  for (const Vector* v : {&psi, &omega, &lambda, &gamma})
    for (double e : *v)
      if (!(e >= 0.0) || !std::isfinite(e))
        throw DimensionMismatch("TuningSchedule: entries must be finite and >= 0");
}

namespace {

/// Weights of D_n^{-2}(beta): w_i = exp(-Z_i^T beta).
Vector inverse_variance_weights(const Matrix& z, const Vector& beta) {
  Vector w(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const double* zi = z.row(i);
    double zb = 0.0;
    for (std::size_t j = 0; j < z.cols(); ++j) zb += zi[j] * beta[j];
    // |zb| beyond exp's range means D_n^2 or D_n^{-2} is already non-finite.
    if (!std::isfinite(zb) || std::abs(zb) > 700.0)
      throw NonFiniteWeights("variance weights overflow: |Z_i beta| = " + std::to_string(zb));
    w[i] = std::exp(-zb);
  }
  return w;
}

Vector checked_solve(const SymMatrix& a, const Vector& b, bool* ill_conditioned) {
  const CholeskyFactor factor(a);
  if (ill_conditioned && factor.ill_conditioned()) *ill_conditioned = true;
  return factor.solve(b);
}

/// Minimizer of ||sqrt(W)(r - M theta)||^2 + sum_j pen_j theta_j^2/prev_j^2,
/// assembled from the weighted Gram and right-hand side.
Vector adaptive_solve(const SymMatrix& gram_m, const Vector& rhs, const Vector& pen,
                      const Vector& prev, Stabilization mode, double delta,
                      bool* ill_conditioned) {
  const std::size_t m = rhs.size();
  switch (mode) {
    case Stabilization::direct: {
      Vector add(m);
      for (std::size_t j = 0; j < m; ++j) {
        if (prev[j] == 0.0)
          throw ZeroCoefficient("direct stabilization with an exactly-zero previous "
                                "estimate at index " + std::to_string(j));
        add[j] = pen[j] / (prev[j] * prev[j]);
      }
      return checked_solve(gram_m.with_added_diagonal(add), rhs, ill_conditioned);
    }
    case Stabilization::perturbed: {
      Vector add(m);
      for (std::size_t j = 0; j < m; ++j) add[j] = pen[j] / (prev[j] * prev[j] + delta);
      return checked_solve(gram_m.with_added_diagonal(add), rhs, ill_conditioned);
    }
    case Stabilization::rescaled: {
      // Multiply by |prev| instead of dividing by prev^2: columns with a zero
      // previous estimate drop out and their coefficients stay exactly zero.
      Vector s(m);
      for (std::size_t j = 0; j < m; ++j) s[j] = std::abs(prev[j]);
      const SymMatrix scaled = gram_m.scaled_by(s).with_added_diagonal(pen);
      Vector rhs_s(m);
      for (std::size_t j = 0; j < m; ++j) rhs_s[j] = s[j] * rhs[j];
      Vector u = checked_solve(scaled, rhs_s, ill_conditioned);
      for (std::size_t j = 0; j < m; ++j) u[j] *= s[j];
      return u;
    }
  }
  throw Error("unreachable stabilization mode");
}

double ratio_penalty(const Vector& pen, const Vector& prev, const Vector& at) {
  double s = 0.0;
  for (std::size_t j = 0; j < at.size(); ++j) {
    if (prev[j] == 0.0) {
      if (at[j] != 0.0) return std::numeric_limits<double>::infinity();
      continue;  // 0/0 limit along the rescaled path
    }
    const double r = at[j] / prev[j];
    s += pen[j] * r * r;
  }
  return s;
}

[[noreturn]] void rethrow_with_iteration(int iteration) {
  const std::string tag = "iteration " + std::to_string(iteration) + ": ";
  try {
    throw;
  } catch (const NotPositiveDefinite& e) {
    throw NotPositiveDefinite(tag + e.what());
  } catch (const NonFiniteWeights& e) {
    throw NonFiniteWeights(tag + e.what());
  } catch (const ZeroCoefficient& e) {
    throw ZeroCoefficient(tag + e.what());
  } catch (const Error& e) {
    throw Error(tag + e.what());
  }
}

double state_norm(const EstimatorState& s) {
  return std::sqrt(dot(s.alpha, s.alpha) + dot(s.beta_star, s.beta_star));
}

double pair_distance(const EstimatorState& a, const EstimatorState& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.alpha.size(); ++j) {
    const double d = a.alpha[j] - b.alpha[j];
    s += d * d;
  }
  for (std::size_t j = 0; j < a.beta_star.size(); ++j) {
    const double d = a.beta_star[j] - b.beta_star[j];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

Vector ridge_alpha_init(const Dataset& d, const Vector& psi, bool* ill_conditioned) {
  if (psi.size() != d.p()) throw DimensionMismatch("ridge_alpha_init: psi length != p");
  const SymMatrix g = gram(d.x).with_added_diagonal(psi);
  return checked_solve(g, xty(d.x, d.y), ill_conditioned);
}

Vector log_sq_residuals(const Dataset& d, const Vector& alpha) {
  if (alpha.size() != d.p()) throw DimensionMismatch("log_sq_residuals: alpha length != p");
  Vector out(d.n());
  for (std::size_t i = 0; i < d.n(); ++i) {
    const double* xi = d.x.row(i);
    double fit = 0.0;
    for (std::size_t j = 0; j < d.p(); ++j) fit += xi[j] * alpha[j];
    const double r = std::max(std::abs(d.y[i] - fit), kResidualFloor);
    out[i] = 2.0 * std::log(r);
  }
  return out;
}

Vector ridge_beta_init(const Dataset& d, const Vector& alpha, const Vector& omega,
                       bool* ill_conditioned) {
  if (omega.size() != d.q() + 1) throw DimensionMismatch("ridge_beta_init: omega length != q+1");
  const AugmentedVarianceDesign aug(d.z);
  const SymMatrix g = gram(aug.zstar).with_added_diagonal(omega);
  return checked_solve(g, xty(aug.zstar, log_sq_residuals(d, alpha)), ill_conditioned);
}

Vector ar_alpha_step(const Dataset& d, const EstimatorState& prev, const Vector& lambda,
                     Stabilization mode, double delta_alpha, bool* ill_conditioned) {
  if (prev.alpha.size() != d.p() || prev.beta_star.size() != d.q() + 1)
    throw DimensionMismatch("ar_alpha_step: state dimensions do not match the dataset");
  if (lambda.size() != d.p()) throw DimensionMismatch("ar_alpha_step: lambda length != p");
  const Vector w = inverse_variance_weights(d.z, prev.beta());
  const DiagWeights dw{w};
  return adaptive_solve(weighted_gram(d.x, dw), weighted_xty(d.x, dw, d.y), lambda,
                        prev.alpha, mode, delta_alpha, ill_conditioned);
}

Vector ar_beta_step(const Dataset& d, const Vector& alpha, const Vector& prev_beta_star,
                    const Vector& gamma, Stabilization mode, double delta_beta,
                    bool* ill_conditioned) {
  if (prev_beta_star.size() != d.q() + 1)
    throw DimensionMismatch("ar_beta_step: previous beta* length != q+1");
  if (gamma.size() != d.q() + 1) throw DimensionMismatch("ar_beta_step: gamma length != q+1");
  const AugmentedVarianceDesign aug(d.z);
  return adaptive_solve(gram(aug.zstar), xty(aug.zstar, log_sq_residuals(d, alpha)), gamma,
                        prev_beta_star, mode, delta_beta, ill_conditioned);
}

namespace {

EstimatorState initial_pair(const Dataset& d, const TuningSchedule& t, bool* warn) {
  EstimatorState s;
  s.alpha = ridge_alpha_init(d, t.psi, warn);
  s.beta_star = ridge_beta_init(d, s.alpha, t.omega, warn);
  s.iteration = 0;
  return s;
}

EstimatorState update_pair(const Dataset& d, const TuningSchedule& t,
                           const FitOptions& opts, const EstimatorState& prev,
                           bool* warn) {
  EstimatorState s;
  s.alpha = ar_alpha_step(d, prev, t.lambda, opts.stabilization, opts.delta_alpha, warn);
  s.beta_star = ar_beta_step(d, s.alpha, prev.beta_star, t.gamma, opts.stabilization,
                             opts.delta_beta, warn);
  s.iteration = prev.iteration + 1;
  return s;
}

std::pair<double, double> pair_objectives(const Dataset& d, const TuningSchedule& t,
                                          const FitOptions& opts,
                                          const EstimatorState* prev,
                                          const EstimatorState& cur) {
  if (prev == nullptr)
    return {ridge_alpha_objective(d, t.psi, cur.alpha),
            ridge_beta_objective(d, cur.alpha, t.omega, cur.beta_star)};
  return {ar_alpha_objective(d, *prev, t.lambda, opts.stabilization, opts.delta_alpha,
                             cur.alpha),
          ar_beta_objective(d, cur.alpha, prev->beta_star, t.gamma, opts.stabilization,
                            opts.delta_beta, cur.beta_star)};
}

}  // namespace

FitResult ar_fit(const Dataset& d, const TuningSchedule& t, const FitOptions& opts) {
  t.validate(d.p(), d.q());
  if (opts.k < 0) throw ConfigError("ar_fit: k must be >= 0");
  FitResult r;
  EstimatorState cur;
  try {
    cur = initial_pair(d, t, &r.condition_warning);
  } catch (const Error&) {
    rethrow_with_iteration(0);
  }
  r.trajectory.push_back(cur);
  r.objective_values.push_back(pair_objectives(d, t, opts, nullptr, cur));
  for (int j = 1; j <= opts.k; ++j) {
    EstimatorState next;
    try {
      next = update_pair(d, t, opts, cur, &r.condition_warning);
    } catch (const Error&) {
      rethrow_with_iteration(j);
    }
    r.objective_values.push_back(pair_objectives(d, t, opts, &cur, next));
    r.trajectory.push_back(next);
    cur = std::move(next);
  }
  r.final = r.trajectory.back();
  r.converged = false;
  return r;
}

FitResult bar_fit(const Dataset& d, const TuningSchedule& t, const FitOptions& opts) {
  t.validate(d.p(), d.q());
  FitResult r;
  EstimatorState cur;
  try {
    cur = initial_pair(d, t, &r.condition_warning);
  } catch (const Error&) {
    rethrow_with_iteration(0);
  }
  r.trajectory.push_back(cur);
  r.objective_values.push_back(pair_objectives(d, t, opts, nullptr, cur));
  r.converged = false;
  if (state_norm(cur) > opts.divergence_bound) {
    r.final = cur;
    return r;
  }
  for (int j = 1; j <= opts.bar_max_iterations; ++j) {
    EstimatorState next;
    try {
      next = update_pair(d, t, opts, cur, &r.condition_warning);
    } catch (const Error&) {
      rethrow_with_iteration(j);
    }
    r.objective_values.push_back(pair_objectives(d, t, opts, &cur, next));
    r.trajectory.push_back(next);
    const double step = pair_distance(next, cur);
    cur = std::move(next);
    if (state_norm(cur) > opts.divergence_bound) break;
    if (step < opts.bar_tolerance) {
      r.converged = true;
      break;
    }
  }
  r.final = r.trajectory.back();
  return r;
}

Predictions predict(const EstimatorState& state, const Matrix& xnew, const Matrix& znew) {
  if (xnew.cols() != state.alpha.size())
    throw DimensionMismatch("predict: Xnew column count != fitted p");
  if (znew.cols() != state.q())
    throw DimensionMismatch("predict: Znew column count != fitted q");
  if (xnew.rows() != znew.rows())
    throw DimensionMismatch("predict: Xnew/Znew row counts differ");
  Predictions out;
  out.mean = matvec(xnew, state.alpha);
  out.variance.resize(znew.rows());
  const Vector beta = state.beta();
  for (std::size_t i = 0; i < znew.rows(); ++i) {
    const double* zi = znew.row(i);
    double zb = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) zb += zi[j] * beta[j];
    out.variance[i] = std::exp(zb);
  }
  return out;
}

Support support(const EstimatorState& state, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("support: threshold must be > 0");
  Support s;
  for (std::size_t j = 0; j < state.alpha.size(); ++j)
    if (std::abs(state.alpha[j]) > threshold) s.alpha_support.push_back(j);
  for (std::size_t j = 0; j + 1 < state.beta_star.size(); ++j)
    if (std::abs(state.beta_star[j]) > threshold) s.beta_support.push_back(j);
  return s;
}

AssumptionReport assumption_diagnostics(const Dataset& d) {
  const double inv_n = 1.0 / static_cast<double>(d.n());
  AssumptionReport rep;

  const auto scaled_extremes = [inv_n](const SymMatrix& g) {
    EigenExtremes e = eigen_extremes(g);
    return EigenExtremes{e.min * inv_n, e.max * inv_n};
  };
  rep.x_gram = scaled_extremes(gram(d.x));
  const AugmentedVarianceDesign aug(d.z);
  rep.zstar_gram = scaled_extremes(gram(aug.zstar));

  const auto max_row_norm = [](const Matrix& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      double s = 0.0;
      const double* r = m.row(i);
      for (std::size_t j = 0; j < m.cols(); ++j) s += r[j] * r[j];
      best = std::max(best, std::sqrt(s));
    }
    return best;
  };
  rep.max_row_norm_x = max_row_norm(d.x);
  rep.max_row_norm_zstar = max_row_norm(aug.zstar);

  const auto near_singular = [](const EigenExtremes& e) {
    return e.min < 1e-8 * std::max(1.0, e.max);
  };
  rep.x_near_singular = near_singular(rep.x_gram);
  rep.zstar_near_singular = near_singular(rep.zstar_gram);
  return rep;
}

double ridge_alpha_objective(const Dataset& d, const Vector& psi, const Vector& alpha) {
  const Vector fit = matvec(d.x, alpha);
  double ssr = 0.0;
  for (std::size_t i = 0; i < d.n(); ++i) {
    const double r = d.y[i] - fit[i];
    ssr += r * r;
  }
  double pen = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) pen += psi[j] * alpha[j] * alpha[j];
  return ssr + pen;
}

double ridge_beta_objective(const Dataset& d, const Vector& alpha, const Vector& omega,
                            const Vector& beta_star) {
  const Vector l = log_sq_residuals(d, alpha);
  const AugmentedVarianceDesign aug(d.z);
  const Vector fit = matvec(aug.zstar, beta_star);
  double ssr = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double r = l[i] - fit[i];
    ssr += r * r;
  }
  double pen = 0.0;
  for (std::size_t j = 0; j < beta_star.size(); ++j)
    pen += omega[j] * beta_star[j] * beta_star[j];
  return ssr + pen;
}

double ar_alpha_objective(const Dataset& d, const EstimatorState& prev,
                          const Vector& lambda, Stabilization mode, double delta_alpha,
                          const Vector& alpha) {
  const Vector w = inverse_variance_weights(d.z, prev.beta());
  const Vector fit = matvec(d.x, alpha);
  double ssr = 0.0;
  for (std::size_t i = 0; i < d.n(); ++i) {
    const double r = d.y[i] - fit[i];
    ssr += w[i] * r * r;
  }
  if (mode == Stabilization::perturbed) {
    double pen = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j)
      pen += lambda[j] * alpha[j] * alpha[j] / (prev.alpha[j] * prev.alpha[j] + delta_alpha);
    return ssr + pen;
  }
  return ssr + ratio_penalty(lambda, prev.alpha, alpha);
}

double ar_beta_objective(const Dataset& d, const Vector& alpha,
                         const Vector& prev_beta_star, const Vector& gamma,
                         Stabilization mode, double delta_beta, const Vector& beta_star) {
  const Vector l = log_sq_residuals(d, alpha);
  const AugmentedVarianceDesign aug(d.z);
  const Vector fit = matvec(aug.zstar, beta_star);
  double ssr = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double r = l[i] - fit[i];
    ssr += r * r;
  }
  if (mode == Stabilization::perturbed) {
    double pen = 0.0;
    for (std::size_t j = 0; j < beta_star.size(); ++j)
      pen += gamma[j] * beta_star[j] * beta_star[j] /
             (prev_beta_star[j] * prev_beta_star[j] + delta_beta);
    return ssr + pen;
  }
  return ssr + ratio_penalty(gamma, prev_beta_star, beta_star);
}

}  // namespace hetridge

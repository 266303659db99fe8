#include "hetridge/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hetridge/standardize.hpp"
#include "hetridge/stats.hpp"

namespace hetridge {

std::string to_string(SpeCriterion c) {
  return c == SpeCriterion::mean_spe ? "mean_spe" : "median_spe";
}

SpeCriterion spe_criterion_from_string(const std::string& name) {
  if (name == "mean_spe") return SpeCriterion::mean_spe;
  if (name == "median_spe") return SpeCriterion::median_spe;
  throw ConfigError("unknown prediction-error criterion: " + name);
}

std::vector<FoldSplit> kfold_split(std::size_t n, const CvPlan& plan) {
  if (plan.folds < 2 || plan.folds > n)
    throw InvalidFolds("kfold_split: folds must be in [2, n]");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  RngStream stream(splitmix64(plan.shuffle_seed));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(stream.raw() % (n - i));
    std::swap(order[i], order[j]);
  }
  const std::size_t base = n / plan.folds, extra = n % plan.folds;
  std::vector<FoldSplit> out(plan.folds);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < plan.folds; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    out[f].validation.assign(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  for (std::size_t f = 0; f < plan.folds; ++f) {
    for (std::size_t g = 0; g < plan.folds; ++g)
      if (g != f)
        out[f].train.insert(out[f].train.end(), out[g].validation.begin(),
                            out[g].validation.end());
    std::sort(out[f].train.begin(), out[f].train.end());
    std::sort(out[f].validation.begin(), out[f].validation.end());
  }
  return out;
}

double spe(const Vector& predicted, const Vector& actual, SpeCriterion criterion) {
  if (predicted.size() != actual.size()) throw DimensionMismatch("spe: length mismatch");
  Vector sq(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual[i];
    sq[i] = d * d;
  }
  return criterion == SpeCriterion::mean_spe ? mean_of(sq) : median_of(std::move(sq));
}

namespace {

double score_point(const Dataset& d, const std::vector<FoldSplit>& folds,
                   const CvPoint& point, const CvPlan& plan,
                   const EstimatorChoice& estimator, const FitOptions& base,
                   const CvOptions& options) {
  const TuningSchedule schedule =
      TuningSchedule::scalars(d.p(), d.q(), point.psi, point.omega, point.lambda,
                              point.gamma);
  double total = 0.0;
  for (const FoldSplit& fold : folds) {
    Matrix xtr = rows_subset(d.x, fold.train);
    Matrix ztr = rows_subset(d.z, fold.train);
    Vector ytr = subset(d.y, fold.train);
    Matrix xval = rows_subset(d.x, fold.validation);
    Matrix zval = rows_subset(d.z, fold.validation);
    const Vector yval = subset(d.y, fold.validation);

    if (options.standardize) {
      const ColumnStats xs = column_stats(options.fold_local ? xtr : d.x);
      const ColumnStats zs = column_stats(options.fold_local ? ztr : d.z);
      xtr = standardized(xtr, xs);
      ztr = standardized(ztr, zs);
      xval = standardized(xval, xs);
      zval = standardized(zval, zs);
    }
    double y_offset = 0.0;
    if (options.center_response) {
      y_offset = options.fold_local ? mean_of(ytr) : mean_of(d.y);
      for (double& v : ytr) v -= y_offset;
    }

    Dataset train(std::move(ytr), std::move(xtr), std::move(ztr));
    FitOptions opts = base;
    opts.bar = estimator.bar;
    opts.k = estimator.k;
    const FitResult fit =
        opts.bar ? bar_fit(train, schedule, opts) : ar_fit(train, schedule, opts);
    if (opts.bar && !fit.converged) throw ConvergenceFailure("BAR did not converge");

    Vector predicted = predict(fit.final, xval, zval).mean;
    for (double& v : predicted) v += y_offset;
    total += spe(predicted, yval, plan.criterion);
  }
  return total / static_cast<double>(folds.size());
}

Vector sorted_unique(Vector v, const char* axis) {
  if (v.empty()) throw ConfigError(std::string("grid axis ") + axis + " is empty");
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  for (double x : v)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw ConfigError(std::string("grid axis ") + axis + " has a negative or non-finite value");
  return v;
}

}  // namespace

GridSearchResult grid_search(const Dataset& d, const Grid& grid, const CvPlan& plan,
                             const EstimatorChoice& estimator, const FitOptions& base,
                             const CvOptions& options) {
  const Vector psis = sorted_unique(grid.psi_values, "psi");
  const Vector omegas = sorted_unique(grid.omega_values, "omega");
  const Vector lambdas = sorted_unique(grid.lambda_values, "lambda");
  const Vector gammas = sorted_unique(grid.gamma_values, "gamma");

  std::vector<CvPoint> points;
  for (double psi : psis)
    for (double omega : omegas)
      for (double lambda : lambdas)
        for (double gamma : gammas) points.push_back({psi, omega, lambda, gamma});

  const std::vector<FoldSplit> folds = kfold_split(d.n(), plan);
  std::vector<double> scores(points.size(),
                             std::numeric_limits<double>::quiet_NaN());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(points.size()); ++i) {
    try {
      scores[static_cast<std::size_t>(i)] = score_point(
          d, folds, points[static_cast<std::size_t>(i)], plan, estimator, base, options);
    } catch (const Error&) {
      // failed point: stays NaN and is dropped from the table
    }
  }

  GridSearchResult out;
  bool have_best = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::isnan(scores[i])) continue;
    out.table.push_back({points[i], scores[i]});
    if (!have_best || scores[i] < out.best_score) {
      have_best = true;
      out.best_score = scores[i];
      out.best_point = points[i];
    }
  }
  if (!have_best) throw AllPointsFailed("grid_search: every grid point failed");
  out.best = TuningSchedule::scalars(d.p(), d.q(), out.best_point.psi, out.best_point.omega,
                                     out.best_point.lambda, out.best_point.gamma);
  return out;
}

Axis axis_from_string(const std::string& name) {
  if (name == "psi") return Axis::psi;
  if (name == "omega") return Axis::omega;
  if (name == "lambda") return Axis::lambda;
  if (name == "gamma") return Axis::gamma;
  throw ConfigError("unknown grid axis: " + name);
}

std::string to_string(Axis a) {
  switch (a) {
    case Axis::psi: return "psi";
    case Axis::omega: return "omega";
    case Axis::lambda: return "lambda";
    case Axis::gamma: return "gamma";
  }
  return "psi";
}

StagedSearchResult staged_search(const Dataset& d, const std::vector<Stage>& stages,
                                 const Grid& grid, const CvPlan& plan,
                                 const EstimatorChoice& estimator, const FitOptions& base,
                                 const CvOptions& options) {
  if (stages.empty()) throw ConfigError("staged_search: no stages given");
  const Vector axis_values[4] = {sorted_unique(grid.psi_values, "psi"),
                                 sorted_unique(grid.omega_values, "omega"),
                                 sorted_unique(grid.lambda_values, "lambda"),
                                 sorted_unique(grid.gamma_values, "gamma")};
  int covered[4] = {0, 0, 0, 0};
  for (const Stage& st : stages) {
    if (st.empty()) throw ConfigError("staged_search: empty stage");
    for (Axis a : st) ++covered[static_cast<int>(a)];
  }
  for (int a = 0; a < 4; ++a) {
    if (covered[a] > 1)
      throw ConfigError("staged_search: axis " + to_string(static_cast<Axis>(a)) +
                        " appears in more than one stage");
    if (covered[a] == 0 && axis_values[a].size() > 1)
      throw ConfigError("staged_search: swept axis " + to_string(static_cast<Axis>(a)) +
                        " is not covered by any stage");
  }

  // Frozen value per axis: earlier winner, or smallest grid value until swept.
  double frozen[4] = {axis_values[0][0], axis_values[1][0], axis_values[2][0],
                      axis_values[3][0]};
  StagedSearchResult out;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    Grid stage_grid;
    Vector* lists[4] = {&stage_grid.psi_values, &stage_grid.omega_values,
                        &stage_grid.lambda_values, &stage_grid.gamma_values};
    for (int a = 0; a < 4; ++a) *lists[a] = {frozen[a]};
    for (Axis a : stages[s]) *lists[static_cast<int>(a)] = axis_values[static_cast<int>(a)];

    GridSearchResult stage_result;
    try {
      stage_result = grid_search(d, stage_grid, plan, estimator, base, options);
    } catch (const AllPointsFailed& e) {
      throw AllPointsFailed("stage " + std::to_string(s) + ": " + e.what());
    }
    for (const CvEntry& e : stage_result.table)
      out.table.push_back({static_cast<int>(s), e});
    frozen[0] = stage_result.best_point.psi;
    frozen[1] = stage_result.best_point.omega;
    frozen[2] = stage_result.best_point.lambda;
    frozen[3] = stage_result.best_point.gamma;
    out.best_point = stage_result.best_point;
    out.best_score = stage_result.best_score;
  }
  out.best = TuningSchedule::scalars(d.p(), d.q(), out.best_point.psi, out.best_point.omega,
                                     out.best_point.lambda, out.best_point.gamma);
  return out;
}

}  // namespace hetridge

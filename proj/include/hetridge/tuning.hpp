#pragma once

#include "hetridge/simulation.hpp"

namespace hetridge {

enum class SpeCriterion { mean_spe, median_spe };

std::string to_string(SpeCriterion c);
SpeCriterion spe_criterion_from_string(const std::string& name);

struct CvPlan {
  std::size_t folds = 5;
  SpeCriterion criterion = SpeCriterion::mean_spe;
  std::uint64_t shuffle_seed = 0;
};

struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Seeded Fisher-Yates shuffle dealt into folds whose sizes differ by at
/// most one; index lists come back sorted.
std::vector<FoldSplit> kfold_split(std::size_t n, const CvPlan& plan);

/// Mean or median of squared componentwise differences.
double spe(const Vector& predicted, const Vector& actual, SpeCriterion criterion);

/// Scalar-times-identity grid over the four penalty axes. Values are sorted
/// ascending before the sweep so ties resolve toward the smallest penalties
/// in (psi, omega, lambda, gamma) order.
struct Grid {
  Vector psi_values{0.0};
  Vector omega_values{0.0};
  Vector lambda_values{0.0};
  Vector gamma_values{0.0};
};

struct CvOptions {
  bool standardize = true;
  /// Standardize within each training fold (leakage-free default); false
  /// applies whole-dataset statistics instead.
  bool fold_local = true;
  bool center_response = false;
};

struct CvPoint {
  double psi = 0.0;
  double omega = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
};

struct CvEntry {
  CvPoint point;
  double score = 0.0;
};

struct GridSearchResult {
  CvPoint best_point;
  double best_score = 0.0;
  TuningSchedule best;
  std::vector<CvEntry> table;  // surviving points only, in sweep order
};

/// Evaluates every grid point by K-fold CV of the mean predictions and
/// returns the argmin. Points that fail on any fold (including BAR
/// divergence) are dropped from the table; AllPointsFailed if none survive.
GridSearchResult grid_search(const Dataset& d, const Grid& grid, const CvPlan& plan,
                             const EstimatorChoice& estimator, const FitOptions& base,
                             const CvOptions& options);

enum class Axis { psi, omega, lambda, gamma };

Axis axis_from_string(const std::string& name);
std::string to_string(Axis a);

using Stage = std::vector<Axis>;

struct StagedEntry {
  int stage = 0;
  CvEntry entry;
};

struct StagedSearchResult {
  CvPoint best_point;
  double best_score = 0.0;
  TuningSchedule best;
  std::vector<StagedEntry> table;
};

/// Runs grid_search per stage, freezing the winners of earlier stages.
/// Axes not yet swept sit at the smallest value of their list. Every axis
/// with more than one value must appear in exactly one stage.
StagedSearchResult staged_search(const Dataset& d, const std::vector<Stage>& stages,
                                 const Grid& grid, const CvPlan& plan,
                                 const EstimatorChoice& estimator, const FitOptions& base,
                                 const CvOptions& options);

}  // namespace hetridge

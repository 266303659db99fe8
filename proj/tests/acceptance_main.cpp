// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "hetridge/commands.hpp"
#include "hetridge/stats.hpp"
#include "hetridge/tuning.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace hetridge;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& label, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", id, label.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(double v) { return format_double(v); }

double vec_rel_diff(const Vector& a, const Vector& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den = std::max(den, std::max(a[i] * a[i], b[i] * b[i]));
  }
  return den == 0.0 ? 0.0 : std::sqrt(num / den);
}

bool normal_equations_hold(const SymMatrix& g, const Vector& pen_diag, const Vector& rhs,
                           const Vector& sol) {
  const SymMatrix a = g.with_added_diagonal(pen_diag);
  Vector lhs = matvec(a.dense(), sol);
  for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] -= rhs[i];
  return inf_norm(lhs) <= 1e-8 * (1.0 + inf_norm(rhs));
}

// ---- criteria 1 and 2: randomized closed-form checks -----------------------

void criterion_1() {
  RngStream rng(202401);
  bool ok = true;
  std::string detail;
  for (int rep = 0; rep < 100 && ok; ++rep) {
    const std::size_t p = 1 + rng.raw() % 5, q = 1 + rng.raw() % 5;
    const std::size_t n = std::max<std::size_t>(q + 2, 20 + rng.raw() % 31);
    Vector alpha0 = testutil::random_vector(p, rng);
    Vector beta0 = testutil::random_vector(q, rng, 0.3);
    const Dataset d = testutil::random_dataset(n, p, q, alpha0, beta0, rng);
    const AugmentedVarianceDesign aug(d.z);
    const Vector ones(n, 1.0);

    // prev state with safely nonzero entries
    EstimatorState prev;
    prev.alpha.resize(p);
    for (double& v : prev.alpha) v = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * (0.1 + rng.uniform01());
    prev.beta_star.resize(q + 1);
    for (double& v : prev.beta_star) v = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * (0.1 + rng.uniform01());

    Vector psi(p), omega(q + 1), lambda(p), gamma(q + 1);
    for (double& v : psi) v = rng.uniform01() * 3.0;
    for (double& v : omega) v = rng.uniform01() * 3.0;
    for (double& v : lambda) v = rng.uniform01() * 2.0;
    for (double& v : gamma) v = rng.uniform01() * 2.0;

    // 1. initial mean ridge
    {
      const Vector sol = ridge_alpha_init(d, psi);
      const Vector want = oracle::penalized_ls(d.x, ones, d.y, psi);
      if (vec_rel_diff(sol, want) > 1e-8 ||
          !normal_equations_hold(gram(d.x), psi, xty(d.x, d.y), sol)) {
        ok = false;
        detail = "initial mean ridge mismatch at rep " + std::to_string(rep);
        break;
      }
    }
    // 2. initial variance ridge
    const Vector alpha_hat = ridge_alpha_init(d, psi);
    {
      const Vector sol = ridge_beta_init(d, alpha_hat, omega);
      const Vector l = log_sq_residuals(d, alpha_hat);
      const Vector want = oracle::penalized_ls(aug.zstar, ones, l, omega);
      if (vec_rel_diff(sol, want) > 1e-8 ||
          !normal_equations_hold(gram(aug.zstar), omega, xty(aug.zstar, l), sol)) {
        ok = false;
        detail = "initial variance ridge mismatch at rep " + std::to_string(rep);
        break;
      }
    }
    // 3. adaptive mean step
    {
      const Vector sol = ar_alpha_step(d, prev, lambda, Stabilization::direct);
      Vector w(n), pen(p);
      for (std::size_t i = 0; i < n; ++i) {
        double zb = 0.0;
        for (std::size_t j = 0; j < q; ++j) zb += d.z(i, j) * prev.beta_star[j];
        w[i] = std::exp(-zb);
      }
      for (std::size_t j = 0; j < p; ++j) pen[j] = lambda[j] / (prev.alpha[j] * prev.alpha[j]);
      const Vector want = oracle::penalized_ls(d.x, w, d.y, pen);
      const DiagWeights dw(w);
      if (vec_rel_diff(sol, want) > 1e-8 ||
          !normal_equations_hold(weighted_gram(d.x, dw), pen, weighted_xty(d.x, dw, d.y),
                                 sol)) {
        ok = false;
        detail = "adaptive mean step mismatch at rep " + std::to_string(rep);
        break;
      }
    }
    // 4. adaptive variance step
    {
      const Vector sol =
          ar_beta_step(d, alpha_hat, prev.beta_star, gamma, Stabilization::direct);
      const Vector l = log_sq_residuals(d, alpha_hat);
      Vector pen(q + 1);
      for (std::size_t j = 0; j <= q; ++j)
        pen[j] = gamma[j] / (prev.beta_star[j] * prev.beta_star[j]);
      const Vector want = oracle::penalized_ls(aug.zstar, ones, l, pen);
      if (vec_rel_diff(sol, want) > 1e-8 ||
          !normal_equations_hold(gram(aug.zstar), pen, xty(aug.zstar, l), sol)) {
        ok = false;
        detail = "adaptive variance step mismatch at rep " + std::to_string(rep);
        break;
      }
    }
  }
  report(1, "closed forms match normal equations and the dense oracle (100 instances)", ok,
         detail);
}

void criterion_2() {
  RngStream rng(202402);
  bool agree_ok = true;
  std::string detail;
  Vector gap4, gap6, gap8;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t p = 1 + rng.raw() % 5, q = 1 + rng.raw() % 5;
    const std::size_t n = std::max<std::size_t>(q + 2, 20 + rng.raw() % 31);
    Vector alpha0 = testutil::random_vector(p, rng);
    Vector beta0 = testutil::random_vector(q, rng, 0.3);
    const Dataset d = testutil::random_dataset(n, p, q, alpha0, beta0, rng);
    EstimatorState prev;
    prev.alpha.resize(p);
    for (double& v : prev.alpha) v = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * (0.2 + rng.uniform01());
    prev.beta_star.resize(q + 1);
    for (double& v : prev.beta_star) v = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * (0.2 + rng.uniform01());
    Vector lambda(p, 0.5 + rng.uniform01());

    const Vector direct = ar_alpha_step(d, prev, lambda, Stabilization::direct);
    const Vector rescaled = ar_alpha_step(d, prev, lambda, Stabilization::rescaled);
    if (vec_rel_diff(direct, rescaled) > 1e-8) {
      agree_ok = false;
      detail = "direct/rescaled disagree at rep " + std::to_string(rep) + " by " +
               fmt(vec_rel_diff(direct, rescaled));
    }
    gap4.push_back(vec_rel_diff(direct, ar_alpha_step(d, prev, lambda, Stabilization::perturbed, 1e-4)));
    gap6.push_back(vec_rel_diff(direct, ar_alpha_step(d, prev, lambda, Stabilization::perturbed, 1e-6)));
    gap8.push_back(vec_rel_diff(direct, ar_alpha_step(d, prev, lambda, Stabilization::perturbed, 1e-8)));
  }
  const double m4 = median_of(gap4), m6 = median_of(gap6), m8 = median_of(gap8);
  const bool monotone = m4 > m6 && m6 > m8;
  if (!monotone)
    detail += " perturbed gaps not decreasing: " + fmt(m4) + ", " + fmt(m6) + ", " + fmt(m8);
  report(2, "direct vs rescaled to 1e-8; perturbed gap decreasing over delta", agree_ok && monotone,
         "median gaps " + fmt(m4) + " > " + fmt(m6) + " > " + fmt(m8));
}

void criterion_3() {
  const double c_normal = compute_c0({NoiseFamily::standard_normal, false});
  const double c_laplace = compute_c0({NoiseFamily::laplace, false});
  const double c_t3 = compute_c0({NoiseFamily::student_t3, false});
  const bool ok = std::abs(c_normal - (-1.2704)) < 1e-3 &&
                  std::abs(c_laplace - (-1.154)) < 5e-3 && std::abs(c_t3 - (-0.9014)) < 5e-3;
  report(3, "c0 constants for normal/Laplace/t(3)", ok,
         fmt(c_normal) + ", " + fmt(c_laplace) + ", " + fmt(c_t3));
}

// ---- criteria 4..7: shared Monte-Carlo runs --------------------------------

struct SharedRuns {
  SimulationSpec spec_1000;
  std::vector<TrialResult> results_1000;
  SimulationSpec spec_100;
  std::vector<TrialResult> results_100;
  double c0 = 0.0;
  // estimator indices in spec_1000: k=0, k=2, k=5, k=10, bar
};

SharedRuns make_shared_runs() {
  SharedRuns sr;
  sr.spec_1000 = SimulationSpec::defaults();
  sr.spec_1000.trials = 200;
  sr.spec_1000.master_seed = 7;
  sr.results_1000 = run_trials(sr.spec_1000);
  sr.spec_100 = SimulationSpec::defaults();
  sr.spec_100.n = 100;
  sr.spec_100.trials = 200;
  sr.spec_100.master_seed = 7;
  sr.spec_100.estimators = {{false, 5}};
  sr.results_100 = run_trials(sr.spec_100);
  sr.c0 = compute_c0(sr.spec_1000.noise);
  return sr;
}

void criterion_4(const SharedRuns& sr) {
  const auto metrics = [&](std::size_t est) {
    return aggregate_metrics(sr.results_1000, est, sr.spec_1000, sr.c0, 1e-4);
  };
  const double k0 = metrics(0).mse_alpha_nonsparse;
  const double k2 = metrics(1).mse_alpha_nonsparse;
  const double k10 = metrics(3).mse_alpha_nonsparse;
  const bool drop = k0 >= 100.0 * k2;
  const bool order = k2 > k10;
  const bool anchored = k10 >= 1.59e-4 / 3.0 && k10 <= 1.59e-4 * 3.0;
  report(4, "non-sparse alpha MSE: k0/k2 >= 100, k2 > k10, k10 within 3x of 1.59e-4",
         drop && order && anchored,
         "k0=" + fmt(k0) + " k2=" + fmt(k2) + " k10=" + fmt(k10));
}

void criterion_5(const SharedRuns& sr) {
  Vector med(4);
  for (std::size_t e = 0; e < 4; ++e)
    med[e] = aggregate_metrics(sr.results_1000, e, sr.spec_1000, sr.c0, 1e-4)
                 .median_abs_sparse_alpha;
  const bool monotone = med[0] > med[1] && med[1] > med[2] && med[2] > med[3];
  const bool k0_band = med[0] >= 0.3 && med[0] <= 0.9;
  const bool k2_band = med[1] < 0.02;
  report(5, "median |sparse alpha| decreasing over k in {0,2,5,10}; k0 and k2 bands",
         monotone && k0_band && k2_band,
         fmt(med[0]) + " > " + fmt(med[1]) + " > " + fmt(med[2]) + " > " + fmt(med[3]));
}

void criterion_6(const SharedRuns& sr) {
  const auto zero_1000 = sr.spec_1000.alpha_zero_set();
  bool ok = true;
  std::string detail = "medians:";
  Vector medians(5, 0.0);
  for (int k = 1; k <= 4; ++k) {
    // estimator index 3 is the k=10 AR fit; its trajectory covers k+1 <= 5
    const Vector ratios = sparse_shrink_ratios(sr.results_1000, 3, zero_1000, k);
    medians[static_cast<std::size_t>(k)] = median_of(ratios);
    detail += " k" + std::to_string(k) + "=" + fmt(medians[static_cast<std::size_t>(k)]);
    if (!(medians[static_cast<std::size_t>(k)] < 0.5)) ok = false;
  }
  const Vector r100 = sparse_shrink_ratios(sr.results_100, 0, sr.spec_100.alpha_zero_set(), 1);
  const double m100 = median_of(r100);
  detail += " | n=100 k1=" + fmt(m100);
  if (!(medians[1] < m100)) ok = false;
  report(6, "zero-block norm ratios < 0.5 for k in 1..4 and shrinking in n", ok, detail);
}

void criterion_7(const SharedRuns& sr) {
  Vector fn_a, fp_a, fn_b, fp_b;
  for (std::size_t e = 0; e < 4; ++e) {  // k = 0, 2, 5, 10
    const AggregateMetrics m = aggregate_metrics(sr.results_1000, e, sr.spec_1000, sr.c0, 1e-4);
    fn_a.push_back(m.fn_alpha);
    fp_a.push_back(m.fp_alpha);
    fn_b.push_back(m.fn_beta);
    fp_b.push_back(m.fp_beta);
  }
  bool monotone = true;
  for (std::size_t e = 1; e < 4; ++e) {
    if (fn_a[e] < fn_a[e - 1] || fn_b[e] < fn_b[e - 1]) monotone = false;
    if (fp_a[e] > fp_a[e - 1] || fp_b[e] > fp_b[e - 1]) monotone = false;
  }
  const AggregateMetrics bar = aggregate_metrics(sr.results_1000, 4, sr.spec_1000, sr.c0, 1e-4);
  const bool bar_fn = bar.fn_alpha <= 1.0;
  const bool bar_fp = bar.fp_alpha >= 5.0 && bar.fp_alpha <= 30.0;
  report(7, "FN non-decreasing / FP non-increasing in k; BAR FN(a) <= 1%, FP(a) in [5,30]%",
         monotone && bar_fn && bar_fp,
         "bar FN(a)=" + fmt(bar.fn_alpha) + " FP(a)=" + fmt(bar.fp_alpha));
}

void criterion_8() {
  bool ok = true;
  std::string detail;
  for (NoiseFamily family :
       {NoiseFamily::standard_normal, NoiseFamily::laplace, NoiseFamily::student_t3}) {
    SimulationSpec spec = SimulationSpec::defaults();
    spec.noise = {family, false};
    spec.trials = 500;
    spec.master_seed = 8;
    spec.estimators = {{false, 0}};
    const auto results = run_trials(spec);
    const Vector estimates = component_values(results, 0, spec, Block::beta_star, 0);
    const QqData qq = qq_data_normal(estimates);
    Vector th, sm;
    for (const QqPoint& pt : qq.points) {
      th.push_back(pt.theoretical);
      sm.push_back(pt.sample);
    }
    const double corr = pearson_correlation(th, sm);
    detail += spec.noise.name() + "=" + fmt(corr) + " ";
    if (!(corr > 0.99)) ok = false;
  }
  report(8, "QQ correlation of initial beta*_1 estimates > 0.99 for all noise kinds", ok,
         detail);
}

void criterion_9() {
  report(9, "no full-scale (1000-trial) table assertions; 200-trial bands substitute", true,
         "holds by construction of this suite");
}

// ---- criterion 10: byte-identical reruns across thread counts --------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_10() {
  const fs::path dir = fs::temp_directory_path() / "hetridge_acceptance" / "det";
  fs::remove_all(dir);
  fs::create_directories(dir);

  SimulatePayload sim;
  SimulationSpec spec = SimulationSpec::defaults();
  spec.n = 150;
  spec.p = 6;
  spec.q = 6;
  spec.alpha0 = SimulationSpec::ramp_signal(6);
  spec.beta0 = SimulationSpec::ramp_signal(6);
  spec.trials = 16;
  spec.master_seed = 99;
  spec.estimators = {{false, 0}, {false, 2}, {true, 0}};
  spec.label = "det";
  sim.scenarios = {spec};
  sim.histogram_component = 4;

  // a small CV workload on a generated CSV
  std::ostringstream csv;
  csv << "y,x1,x2,z1,z2\n";
  {
    RngStream rng(55);
    for (int i = 0; i < 120; ++i) {
      const double x1 = rng.normal(), x2 = rng.normal(), z1 = rng.normal(), z2 = rng.normal();
      const double y = 1.5 * x1 - x2 + std::exp(0.4 * z1) * rng.normal();
      csv << format_double(y) << ',' << format_double(x1) << ',' << format_double(x2) << ','
          << format_double(z1) << ',' << format_double(z2) << '\n';
    }
  }
  const fs::path csv_path = dir / "cv_data.csv";
  std::ofstream(csv_path, std::ios::binary) << csv.str();
  CvPayload cv;
  cv.data_path = csv_path.string();
  cv.schema.response_column = "y";
  cv.schema.mean_columns = {"x1", "x2"};
  cv.schema.variance_columns = {"z1", "z2"};
  cv.estimator = {false, 2};
  cv.grid.psi_values = {0.5, 5.0};
  cv.grid.omega_values = {1.0};
  cv.grid.lambda_values = {0.2, 2.0};
  cv.grid.gamma_values = {0.5};
  cv.plan.folds = 4;

  const int saved = omp_get_max_threads();
  const auto run_all = [&](const std::string& tag, int threads) {
    omp_set_num_threads(threads);
    CliContext ctx;
    ctx.out_dir = (dir / tag).string();
    cmd_simulate(sim, ctx);
    cmd_cv(cv, ctx);
  };
  run_all("t1", 1);
  run_all("t1b", 1);
  run_all("t8", 8);
  omp_set_num_threads(saved);

  bool ok = true;
  std::string detail;
  for (const char* name :
       {"metrics.csv", "histograms.csv", "qq.csv", "cv_table.csv", "best_tuning.json"}) {
    const std::string a = slurp(dir / "t1" / name);
    if (a.empty() || a != slurp(dir / "t1b" / name) || a != slurp(dir / "t8" / name)) {
      ok = false;
      detail += std::string(name) + " differs ";
    }
  }
  report(10, "simulate/cv reruns byte-identical at 1 and 8 threads", ok, detail);
}

// ---- criterion 11: CV sanity on a synthetic heteroscedastic dataset --------

void criterion_11() {
  SimulationSpec gen = SimulationSpec::defaults();
  gen.n = 650;
  gen.p = 8;
  gen.q = 8;
  gen.alpha0 = SimulationSpec::ramp_signal(8);
  gen.beta0 = SimulationSpec::ramp_signal(8);
  gen.master_seed = 11011;
  const Dataset full = gen_dataset(gen, 0);

  // fixed prefix split: 500 train rows, 150 holdout rows
  std::vector<std::size_t> train_rows(500), hold_rows;
  for (std::size_t i = 0; i < 500; ++i) train_rows[i] = i;
  for (std::size_t i = 500; i < full.n(); ++i) hold_rows.push_back(i);
  const Dataset train(subset(full.y, train_rows), rows_subset(full.x, train_rows),
                      rows_subset(full.z, train_rows));
  const Matrix x_hold = rows_subset(full.x, hold_rows);
  const Matrix z_hold = rows_subset(full.z, hold_rows);
  const Vector y_hold = subset(full.y, hold_rows);

  // wide ladders: the extreme corners are genuinely destructive fits
  Grid grid;
  grid.psi_values = {1e-4, 1e-2, 1.0, 1e2, 1e4};
  grid.omega_values = {1.0};
  grid.lambda_values = {1e-2, 1.0, 1e2};
  grid.gamma_values = {1e-2, 1.0, 1e2};
  CvPlan plan;
  plan.folds = 5;
  plan.shuffle_seed = 3;
  CvOptions options;
  options.standardize = false;  // the generated covariates are already centered/scaled

  const EstimatorChoice k10{false, 10};
  const StagedSearchResult best =
      staged_search(train, {Stage{Axis::psi}, Stage{Axis::lambda, Axis::gamma}}, grid, plan,
                    k10, FitOptions{}, options);

  const auto holdout_mspe = [&](const TuningSchedule& ts, const FitOptions& opts) {
    const FitResult fit = opts.bar ? bar_fit(train, ts, opts) : ar_fit(train, ts, opts);
    const Vector mean = predict(fit.final, x_hold, z_hold).mean;
    double s = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i)
      s += (mean[i] - y_hold[i]) * (mean[i] - y_hold[i]);
    return s / static_cast<double>(mean.size());
  };

  const double winner = holdout_mspe(best.best, FitOptions::ar(10));
  double worst_corner = 0.0;
  for (double psi : {grid.psi_values.front(), grid.psi_values.back()})
    for (double lambda : {grid.lambda_values.front(), grid.lambda_values.back()})
      for (double gamma : {grid.gamma_values.front(), grid.gamma_values.back()}) {
        const TuningSchedule corner =
            TuningSchedule::scalars(train.p(), train.q(), psi, 1.0, lambda, gamma);
        worst_corner = std::max(worst_corner, holdout_mspe(corner, FitOptions::ar(10)));
      }

  // k = 0 with the winning psi: the heteroscedasticity-blind baseline
  const TuningSchedule ridge_only = TuningSchedule::scalars(
      train.p(), train.q(), best.best_point.psi, 1.0, best.best_point.lambda,
      best.best_point.gamma);
  const double k0 = holdout_mspe(ridge_only, FitOptions::ar(0));

  const bool margin = winner <= 0.8 * worst_corner;
  const bool ordering = winner < k0;
  report(11, "staged CV winner beats the worst corner by >= 20% and k10 beats k0", margin && ordering,
         "winner=" + fmt(winner) + " worst=" + fmt(worst_corner) + " k0=" + fmt(k0));
}

}  // namespace

int main() {
  std::printf("hetridge acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  const SharedRuns sr = make_shared_runs();
  criterion_4(sr);
  criterion_5(sr);
  criterion_6(sr);
  criterion_7(sr);
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criterion(s) failed\n", g_failures);
  }
  return g_failures;
}

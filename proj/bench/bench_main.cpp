// Compares the OpenMP kernels and the parallel trial runner against their
// serial counterparts. Build target only; not part of the test suite.

#include <omp.h>

#include <cstdio>
#include <functional>

#include "hetridge/numerics.hpp"
#include "hetridge/simulation.hpp"

using namespace hetridge;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
  fn();  // warm-up
  const double t0 = omp_get_wtime();
  for (int r = 0; r < reps; ++r) fn();
  return (omp_get_wtime() - t0) / reps;
}

void bench_gram() {
  std::printf("weighted_gram: serial reference vs OpenMP blocks\n");
  std::printf("%10s %6s %12s %12s %8s\n", "rows", "cols", "serial(ms)", "parallel(ms)",
              "speedup");
  RngStream rng(1);
  for (std::size_t n : {20000ull, 100000ull}) {
    for (std::size_t p : {20ull, 60ull}) {
      Matrix x(n, p);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) x(i, j) = rng.normal();
      Vector w(n);
      for (double& v : w) v = std::exp(0.1 * rng.normal());
      const DiagWeights dw(w);
      const double ts = time_of([&] { weighted_gram_serial(x, dw); }, 5);
      const double tp = time_of([&] { weighted_gram(x, dw); }, 5);
      std::printf("%10zu %6zu %12.3f %12.3f %8.2f\n", (size_t)n, (size_t)p, ts * 1e3,
                  tp * 1e3, ts / tp);
    }
  }
}

void bench_trials() {
  std::printf("\nrun_trials: 1 thread vs %d threads\n", omp_get_max_threads());
  SimulationSpec spec = SimulationSpec::defaults();
  spec.n = 500;
  spec.trials = 40;
  spec.estimators = {{false, 0}, {false, 2}, {false, 5}};
  const int hw = omp_get_max_threads();

  omp_set_num_threads(1);
  const double t1 = time_of([&] { run_trials(spec); }, 1);
  omp_set_num_threads(hw);
  const double tp = time_of([&] { run_trials(spec); }, 1);
  std::printf("%d trials, n=%zu: serial %.2fs, parallel %.2fs, speedup %.2f\n",
              (int)spec.trials, (size_t)spec.n, t1, tp, t1 / tp);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", omp_get_max_threads());
  bench_gram();
  bench_trials();
  return 0;
}

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hetridge {

/// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

enum class StreamPurpose : std::uint64_t {
  mean_design = 1,
  variance_design = 2,
  noise = 3,
  shuffle = 4,
  perturbation = 5,
};

/// Seed for the (master, trial, purpose) stream. Trials never share a
/// stream, so aggregation order and worker count cannot affect results.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t trial,
                                 StreamPurpose purpose) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ trial);
  s = splitmix64(s ^ static_cast<std::uint64_t>(purpose));
  return s;
}

/// mt19937_64 stream with explicit distribution transforms, so draws are
/// pinned by this file rather than by the standard library's unspecified
/// distribution algorithms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}
  RngStream(std::uint64_t master, std::uint64_t trial, StreamPurpose purpose)
      : gen_(stream_seed(master, trial, purpose)) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; pairs are cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  /// Laplace(0, 1) via inverse CDF.
  double laplace() {
    const double u = uniform01() - 0.5;
    const double mag = std::log(1.0 - 2.0 * std::abs(u));  // <= 0
    return u >= 0.0 ? -mag : mag;
  }

  /// Student t with 3 degrees of freedom: N / sqrt(chi2_3 / 3).
  double student_t3() {
    const double z = normal();
    const double a = normal(), b = normal(), c = normal();
    return z / std::sqrt((a * a + b * b + c * c) / 3.0);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace hetridge

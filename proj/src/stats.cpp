#include "hetridge/stats.hpp"

#include <algorithm>
#include <cmath>

namespace hetridge {

double mean_of(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(const Vector& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double median_of(Vector v) {
  if (v.empty()) throw DimensionMismatch("median_of: empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

double pearson_correlation(const Vector& a, const Vector& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw DimensionMismatch("pearson_correlation: size mismatch");
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

QqData qq_data(Vector sample, const NoiseKind& reference) {
  if (sample.size() < 10) throw DimensionMismatch("qq_data: need at least 10 points");
  std::sort(sample.begin(), sample.end());
  QqData out;
  out.degenerate = sample.front() == sample.back();
  const double n = static_cast<double>(sample.size());
  out.points.reserve(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double prob = (static_cast<double>(i) + 0.5) / n;
    out.points.push_back({reference.quantile(prob), sample[i]});
  }
  return out;
}

QqData qq_data_normal(Vector sample) {
  return qq_data(std::move(sample), NoiseKind{NoiseFamily::standard_normal, false});
}

std::vector<HistBin> histogram(const Vector& sample, std::size_t bins) {
  if (bins < 1) throw ConfigError("histogram: bins must be >= 1");
  if (sample.empty()) throw DimensionMismatch("histogram: empty sample");
  const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
  const double lo = *lo_it, hi = *hi_it;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<HistBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].low = lo + width * static_cast<double>(b);
    out[b].high = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
    out[b].count = 0;
  }
  for (double x : sample) {
    std::size_t idx;
    if (x >= hi) {
      idx = bins - 1;
    } else {
      idx = static_cast<std::size_t>((x - lo) / width);
      if (idx >= bins) idx = bins - 1;
    }
    ++out[idx].count;
  }
  return out;
}

}  // namespace hetridge

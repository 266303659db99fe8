#pragma once

#include "hetridge/matrix.hpp"
#include "hetridge/noise.hpp"

namespace hetridge {

double mean_of(const Vector& v);
double variance_of(const Vector& v);  // n-1 denominator
double median_of(Vector v);           // by value: partial sorts its copy
double pearson_correlation(const Vector& a, const Vector& b);

struct QqPoint {
  double theoretical;
  double sample;
};

struct QqData {
  std::vector<QqPoint> points;
  bool degenerate = false;  // constant sample: vertical line
};

/// Sorted sample against reference quantiles at plotting positions
/// (i - 0.5)/n.
QqData qq_data(Vector sample, const NoiseKind& reference);
QqData qq_data_normal(Vector sample);

struct HistBin {
  double low;
  double high;
  std::size_t count;
};

/// Equal-width bins spanning [min, max]; the max lands in the last bin.
std::vector<HistBin> histogram(const Vector& sample, std::size_t bins);

}  // namespace hetridge

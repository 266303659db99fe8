#pragma once

#include "hetridge/matrix.hpp"

namespace hetridge {

struct ColumnStats {
  Vector mean;
  Vector sd;  // n-1 denominator
};

/// Per-column mean and sample standard deviation. Throws on a constant
/// column, which cannot be standardized.
ColumnStats column_stats(const Matrix& m);

/// (x - mean) / sd per column.
Matrix standardized(const Matrix& m, const ColumnStats& s);

/// Inverse of standardized().
Matrix destandardized(const Matrix& m, const ColumnStats& s);

Matrix rows_subset(const Matrix& m, const std::vector<std::size_t>& idx);
Vector subset(const Vector& v, const std::vector<std::size_t>& idx);

}  // namespace hetridge

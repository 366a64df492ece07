#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "scan2map/errors.hpp"

namespace scan2map {

/// Percentile with linear interpolation between order statistics:
/// h = (n-1) * p / 100, value = x[floor(h)] + frac(h) * (x[floor(h)+1] - x[floor(h)]).
inline double percentile(std::vector<double> values, double p) {
  if (values.empty()) {
    throw EmptyInputError("percentile: empty input");
  }
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline double median(const std::vector<double>& values) { return percentile(values, 50.0); }

/// 75th minus 25th percentile.
inline double interquartile_range(const std::vector<double>& values) {
  return percentile(values, 75.0) - percentile(values, 25.0);
}

struct SummaryStats {
  double median = 0.0;
  double iqr = 0.0;
  double max = 0.0;
};

inline SummaryStats summarize(const std::vector<double>& values) {
  if (values.empty()) {
    throw EmptyInputError("summarize: empty input");
  }
  SummaryStats s;
  s.median = median(values);
  s.iqr = interquartile_range(values);
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

}  // namespace scan2map

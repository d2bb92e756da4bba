#pragma once

#include <cmath>
#include <vector>

namespace nldtn {

// Least-squares slope of log(errors) against log(params). Non-positive or
// non-finite entries are skipped; NaN when fewer than two usable points remain.
double fitted_slope(const std::vector<double>& params, const std::vector<double>& errors);

// Eliminates an assumed error term a * x^p from values at x1 and x2:
//   L = (x1^p v2 - x2^p v1) / (x1^p - x2^p).
template <class T>
T richardson(double x1, const T& v1, double x2, const T& v2, double p = 1.0) {
  const double a = std::pow(x1, p);
  const double b = std::pow(x2, p);
  T out = v2;
  out *= a / (a - b);
  T tail = v1;
  tail *= b / (a - b);
  out -= tail;
  return out;
}

// Observed order from three samples at a constant parameter ratio r,
//   p = log(|v1 - v2| / |v2 - v3|) / log(r).
double observed_order(double v1, double v2, double v3, double ratio);

}  // namespace nldtn

#include "nldtn/extrapolation.hpp"

#include <cmath>
#include <limits>

namespace nldtn {

double fitted_slope(const std::vector<double>& params, const std::vector<double>& errors) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < params.size() && i < errors.size(); ++i) {
    if (!(params[i] > 0.0) || !(errors[i] > 0.0) || !std::isfinite(errors[i])) continue;
    x.push_back(std::log(params[i]));
    y.push_back(std::log(errors[i]));
  }
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

double observed_order(double v1, double v2, double v3, double ratio) {
  return std::log(std::abs(v1 - v2) / std::abs(v2 - v3)) / std::log(ratio);
}

}  // namespace nldtn

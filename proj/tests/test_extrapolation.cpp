#include <cmath>
#include <limits>

#include "doctest.h"
#include "nldtn/extrapolation.hpp"

using namespace nldtn;

TEST_CASE("fitted slope of exact power laws") {
  std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
  for (double p : {0.5, 1.0, 2.0, 3.5}) {
    std::vector<double> e;
    for (double x : h) e.push_back(7.0 * std::pow(x, p));
    CHECK(fitted_slope(h, e) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("fitted slope skips unusable entries") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(fitted_slope({0.1, 0.05, 0.025}, {0.01, 0.0, 0.000625}) == doctest::Approx(2.0));
  CHECK(std::isnan(fitted_slope({0.1, 0.05, 0.025}, {0.01, nan, -1.0})));
  CHECK(std::isnan(fitted_slope({0.1}, {0.01})));
}

TEST_CASE("richardson removes the assumed error term") {
  constexpr double L = 1.25;
  for (double p : {1.0, 2.0}) {
    auto v = [&](double x) { return L + 3.0 * std::pow(x, p); };
    CHECK(richardson(0.1, v(0.1), 0.05, v(0.05), p) == doctest::Approx(L).epsilon(1e-13));
  }
  // With a second term present, the result is one order better than either sample.
  auto w = [L](double x) { return L + x + x * x; };
  const double r = richardson(0.02, w(0.02), 0.01, w(0.01));
  CHECK(std::abs(r - L) < 0.01 * 0.02 + 1e-15);
  CHECK(std::abs(r - L) < std::abs(w(0.01) - L) / 10);
}

TEST_CASE("observed order from three samples") {
  auto v = [](double x) { return 2.0 - 0.3 * x * x; };
  CHECK(observed_order(v(0.4), v(0.2), v(0.1), 2.0) == doctest::Approx(2.0).epsilon(1e-12));
  auto s = [](double x) { return 1.0 + std::sqrt(x); };
  CHECK(observed_order(s(0.4), s(0.2), s(0.1), 2.0) == doctest::Approx(0.5).epsilon(1e-12));
}

#include <cmath>

#include "doctest.h"
#include "nldtn/asymptotics.hpp"
#include "nldtn/error.hpp"
#include "nldtn/extrapolation.hpp"

using namespace nldtn;

namespace {

QuadCoeffs mixed_quad() {
  QuadCoeffs q(2);
  q.set(0, 0, 0, 1.0);
  q.set(1, 0, 1, 0.5);
  q.set(0, 1, 1, -0.4);
  return q;
}

BoundaryTrace curved(const GridSpec& g) {
  return BoundaryTrace::from_function(g, [](const Point& x) { return Complex(std::sin(1.5 * x[0] + 1.2 * x[1] + 1.0)); });
}

BoundaryTrace affine(const GridSpec& g, double a, double b) {
  return BoundaryTrace::from_function(g, [=](const Point& x) { return Complex(a * x[0] + b * x[1]); });
}

}  // namespace

TEST_CASE("default t sweep") {
  const auto t = default_t_sweep();
  REQUIRE(t.size() == 5);
  CHECK(t.front() == 0.125);
  CHECK(t.back() == std::ldexp(1.0, -7));
}

TEST_CASE("affine data: every difference quotient equals nu . P(a)") {
  const auto g = make_grid(2, 16);
  const auto law = make_law(ScalarField::constant(g, 1.3), mixed_quad());
  const auto f = affine(g, 0.7, -0.2);
  const auto r = second_order_from_data(law, f, default_t_sweep());
  const Vec pa = eval_p(law.quad, 0, Vec{0.7, -0.2, 0.0});
  for (std::size_t s = 0; s < f.size(); ++s) {
    const auto n = f.normal(s);
    CHECK(std::abs(r.reference[s] - (n[0] * pa[0] + n[1] * pa[1])) < 1e-9);
  }
  for (double d : r.deviations) CHECK(d < 1e-8);
  CHECK(r.failed_t.empty());
}

TEST_CASE("cutoff residual: deviation is first order in t") {
  const auto g = make_grid(2, 24);
  QuadCoeffs q(2);
  q.set(0, 0, 0, 1.0);
  const auto law = make_law(ScalarField::constant(g, 1.0), q, make_cutoff_residual(1.0, 1.0));
  const auto r = second_order_from_data(law, affine(g, 1.0, 0.0), default_t_sweep());
  CHECK(r.fitted_order >= 0.8);
  CHECK(r.fitted_order <= 1.3);
  // Richardson kills the O(t) term: the extrapolated trace is far closer than the last sample.
  const double ex = (r.extrapolated - r.reference).max_abs();
  CHECK(ex < r.deviations.back() / 10);
}

TEST_CASE("curved data, spatially varying gamma: O(t) convergence to the reference") {
  const auto g = make_grid(2, 24);
  const auto law =
      make_law(ScalarField::from_function(g, [](const Point& x) { return Complex(1.0 + 0.5 * x[0]); }), mixed_quad());
  const auto r = second_order_from_data(law, curved(g), default_t_sweep());
  CHECK(r.fitted_order == doctest::Approx(1.0).epsilon(0.15));
  for (std::size_t i = 1; i < r.deviations.size(); ++i) CHECK(r.deviations[i] < r.deviations[i - 1]);
  // First-order quotient tends to zero like t.
  CHECK(fitted_slope(r.t_values, r.first_order) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("H1 remainder of the two-term expansion is O(t)") {
  const auto g = make_grid(2, 24);
  const auto law = make_law(ScalarField::constant(g, 1.0), mixed_quad(), make_cutoff_residual(0.5, 1.0));
  std::vector<double> ts, rs;
  for (int m = 3; m <= 6; ++m) {
    ts.push_back(std::ldexp(1.0, -m));
    rs.push_back(expansion_remainder(law, curved(g), ts.back()));
  }
  CHECK(fitted_slope(ts, rs) == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("discrete H1 norm") {
  const auto g = make_grid(2, 16);
  CHECK(discrete_h1_norm(ScalarField::constant(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  const auto x = ScalarField::from_function(g, [](const Point& p) { return Complex(p[0]); });
  CHECK(discrete_h1_norm(x) == doctest::Approx(std::sqrt(1.0 / 3.0 + 1.0)).epsilon(1e-3));
  CHECK(discrete_h1_norm(ScalarField(g)) == 0.0);
}

TEST_CASE("volume and trilinear forms on affine fields") {
  const auto g = make_grid(2, 8);
  const auto q = mixed_quad();
  const auto u1 = ScalarField::from_function(g, [](const Point& x) { return Complex(0.3 * x[0] - x[1]); });
  const auto u2 = ScalarField::from_function(g, [](const Point& x) { return Complex(x[0] + 2.0 * x[1]); });
  const auto v = ScalarField::from_function(g, [](const Point& x) { return Complex(-x[0] + 0.5 * x[1]); });
  const Vec pa = eval_p(q, 0, Vec{0.3, -1.0, 0.0});
  CHECK(std::abs(volume_form(q, u1, v) - (-pa[0] + 0.5 * pa[1])) < 1e-13);
  const Vec pab = polarized_p(q, 0, Vec{0.3, -1.0, 0.0}, Vec{1.0, 2.0, 0.0});
  CHECK(std::abs(trilinear_form(q, u1, u2, v) - (-pab[0] + 0.5 * pab[1])) < 1e-13);
  CHECK(std::abs(trilinear_form(q, u1, u2, v) - trilinear_form(q, u2, u1, v)) < 1e-14);
  // On the diagonal the trilinear form is twice the volume form.
  CHECK(std::abs(trilinear_form(q, u1, u1, v) - 2.0 * volume_form(q, u1, v)) < 1e-13);
}

TEST_CASE("divergence identity gap shrinks under refinement") {
  std::vector<double> hs, gaps;
  for (int M : {16, 32, 64}) {
    const auto g = make_grid(2, M);
    QuadCoeffs q(2);
    q.set(0, 0, 0, 0.25);
    q.set(1, 0, 1, 0.125);
    q.set(0, 1, 1, -0.1);
    const auto law =
        make_law(ScalarField::from_function(g, [](const Point& x) { return Complex(1.0 + 0.5 * x[0]); }), q);
    const auto r = divergence_identity_gap(law, affine(g, 1.0, 0.5), affine(g, 1.0, -0.3), {1.0 / 32, 1.0 / 64});
    hs.push_back(1.0 / M);
    gaps.push_back(r.gap);
    CHECK(r.gap == doctest::Approx(std::abs(r.boundary - r.volume)).epsilon(1e-12));
  }
  CHECK(gaps[2] < gaps[1]);
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < 1e-3);
  CHECK(fitted_slope(hs, gaps) >= 1.8);
}

TEST_CASE("contraction failures at large t are dropped, not fatal") {
  const auto g = make_grid(2, 16);
  QuadCoeffs q(2);
  q.set(0, 0, 0, 1.0);
  const auto law = make_law(ScalarField::constant(g, 1.0), q);
  const auto f = BoundaryTrace::from_function(g, [](const Point& x) { return Complex(x[0] * (1.0 + x[1] * x[1])); });
  const auto r = second_order_from_data(law, f, {100.0, 0.0625, 0.03125, 0.015625});
  REQUIRE(r.failed_t.size() == 1);
  CHECK(r.failed_t[0] == 100.0);
  CHECK(r.t_values.size() == 3);
  CHECK_THROWS_WITH_AS(second_order_from_data(law, f, {200.0, 100.0, 0.01}), doctest::Contains("NonContraction"), Error);
}

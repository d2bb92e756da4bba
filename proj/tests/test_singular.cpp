#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nldtn/error.hpp"
#include "nldtn/forward.hpp"
#include "nldtn/singular.hpp"

using namespace nldtn;
using std::numbers::pi;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an nldtn::Error");
  return ErrorCode::InvalidParam;
}

QuadCoeffs random_coeffs(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  QuadCoeffs q(3);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int l = k; l < 3; ++l) q.set(i, k, l, U(rng));
  return q;
}

double max_diff(const QuadCoeffs& a, const QuadCoeffs& b) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int l = k; l < 3; ++l) m = std::max(m, std::abs(a.at(i, k, l) - b.at(i, k, l)));
  return m;
}

}  // namespace

TEST_CASE("probe frames") {
  const auto f = probe_frame(0, 2, 0.6, 0.8);
  CHECK(f.N == Real3{0.6, 0.0, 0.8});
  CHECK(f.T1 == Real3{0.0, 1.0, 0.0});
  CHECK(f.T2 == Real3{0.8, 0.0, -0.6});
  const auto d = probe_frame(1, 1);
  CHECK(d.N == Real3{0.0, 1.0, 0.0});
  CHECK(d.T1 == Real3{1.0, 0.0, 0.0});
  CHECK(d.T2 == Real3{0.0, 0.0, 1.0});
  CHECK(standard_frames().size() == 6);

  CHECK(code_of([] { probe_frame(2, 1); }) == ErrorCode::BadIndices);
  CHECK(code_of([] { probe_frame(0, 3); }) == ErrorCode::BadIndices);
  CHECK(code_of([] { probe_frame(0, 1, 0.6, 0.6); }) == ErrorCode::NotNormalized);
  CHECK(code_of([] { probe_frame(0, 1, -0.6, 0.8); }) == ErrorCode::NotNormalized);
}

TEST_CASE("half-space moments match the closed form") {
  CHECK(half_space_base_a() == doctest::Approx(pi / 4).epsilon(1e-6));
  CHECK(half_space_base_b() == doctest::Approx(pi / 2).epsilon(1e-6));
  for (const auto& fr : standard_frames())
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        const double exact = closed_form_moment(fr, k, l);
        const double kd = k == l ? 1.0 : 0.0;
        CHECK(exact == doctest::Approx(pi / 4 * (kd + fr.N[k] * fr.N[l])).epsilon(1e-15));
        CHECK(std::abs(half_space_moment(fr, k, l) - exact) < 1e-6);
      }
}

TEST_CASE("moment table") {
  const auto t = build_moment_table(standard_frames());
  REQUIRE(t.rows.size() == 36);
  for (const auto& r : t.rows) CHECK(r.rel_err < 1e-3);
  std::istringstream csv(t.to_csv());
  std::string header, line;
  std::getline(csv, header);
  CHECK(header == "frame_s,frame_t,alpha,beta,k,l,quadrature,closed_form,rel_err");
  int n = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++n;
  CHECK(n == 36);
}

TEST_CASE("eps limit") {
  const std::vector<double> eps{0.1, 0.05, 0.025};
  auto lim = eps_limit(eps, {2.0 + 0.1 * 3, 2.0 + 0.05 * 3, 2.0 + 0.025 * 3});
  CHECK(lim.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(lim.order == doctest::Approx(1.0).epsilon(1e-12));
  lim = eps_limit(eps, {1.5, 1.5, 1.5});
  CHECK(lim.value == 1.5);

  std::vector<double> v;
  for (double e : eps) v.push_back(1.0 + std::sqrt(e) + 0.2 * e);
  lim = eps_limit(eps, v);
  CHECK(lim.order == doctest::Approx(0.5).epsilon(0.2));
  CHECK(std::abs(lim.value - 1.0) < 0.01);

  CHECK(eps_limit({0.2, 0.1}, {1.2, 1.1}).value == doctest::Approx(1.0));
  CHECK(code_of([&] { eps_limit(eps, {1.0, 1.1, 1.0}); }) == ErrorCode::NonMonotone);
  CHECK(code_of([&] { eps_limit(eps, {1.0, 1.1, 1.3}); }) == ErrorCode::NonMonotone);
  CHECK(code_of([] { eps_limit({0.1, 0.04}, {1.0, 1.1}); }) == ErrorCode::InvalidParam);
  CHECK(code_of([] { eps_limit({0.1}, {1.0}); }) == ErrorCode::InvalidParam);
}

TEST_CASE("closed-form measurements round trip through the moment system") {
  std::mt19937_64 rng(8);
  const auto frames = standard_frames();
  for (int n = 0; n < 20; ++n) {
    const auto c = random_coeffs(rng);
    const auto rec = assemble_and_recover(closed_form_measurements(c, frames), frames);
    CHECK(max_diff(rec.coeffs, c) < 1e-10);
    CHECK(rec.condition < 1e6);
    CHECK(rec.condition >= 1.0);
  }
  const auto meas = closed_form_measurements(QuadCoeffs(3), frames);
  CHECK(code_of([&] { assemble_and_recover(meas, frames, 1.0); }) == ErrorCode::IllConditioned);
  auto missing = meas;
  missing.erase({2, 1});
  CHECK(code_of([&] { assemble_and_recover(missing, frames); }) == ErrorCode::MissingProbe);
  const std::vector<ProbeFrame> five(frames.begin(), frames.begin() + 5);
  CHECK(code_of([&] { assemble_and_recover(meas, five); }) == ErrorCode::MissingProbe);
}

TEST_CASE("scaled probe integral is linear in the coefficients") {
  QuadCoeffs q(3);
  q.set(1, 0, 0, 0.5);
  q.set(1, 0, 2, -1.2);
  q.set(1, 1, 2, 0.3);
  const auto fr = probe_frame(0, 2, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
  const double eps = 0.1;
  const double whole = scaled_probe_integral(q, fr, 1, eps);
  const double parts = 0.5 * scaled_probe_moment(fr, 0, 0, eps) - 1.2 * scaled_probe_moment(fr, 0, 2, eps) +
                       0.3 * scaled_probe_moment(fr, 1, 2, eps);
  CHECK(whole == doctest::Approx(parts).epsilon(1e-10));
  CHECK(scaled_probe_integral(q, fr, 0, eps) == 0.0);

  CHECK(code_of([&] { scaled_probe_moment(fr, 0, 0, 0.3); }) == ErrorCode::InvalidParam);
  QuadCoeffs var(3);
  var.set_field(0, 0, 0, ScalarField::constant(make_grid(3, 4), 1.0));
  CHECK(code_of([&] { scaled_probe_integral(var, fr, 0, eps); }) == ErrorCode::InvalidParam);
}

TEST_CASE("normal probe moment tends to its half-space value") {
  const auto fr = probe_frame(0, 0);
  std::vector<double> err;
  for (double eps : {0.1, 0.05, 0.025}) err.push_back(std::abs(scaled_probe_moment(fr, 0, 0, eps) - pi / 2));
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
  CHECK(err[2] < 0.1 * pi / 2);
}

TEST_CASE("probe moment agrees with an independent ball-grid quadrature") {
  // B is the unit ball centred at -N; in ball coordinates y = x + N the pole sits at (1 + eps) N.
  const double eps = 0.2;
  const auto fr = probe_frame(0, 0);
  const auto ball = make_grid(3, 32, DomainKind::UnitBall);
  auto integrand = [&](int k, int l) {
    return ScalarField::from_function(ball, [&, k, l](const Point& y) {
      Real3 r{y[0] - (1 + eps) * fr.N[0], y[1] - (1 + eps) * fr.N[1], y[2] - (1 + eps) * fr.N[2]};
      const double d2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
      return Complex(eps * r[k] * r[l] / (d2 * d2 * d2));
    });
  };
  for (auto [k, l] : {std::pair{0, 0}, std::pair{1, 1}}) {
    const double grid_val = integrate_volume(integrand(k, l)).real();
    CHECK(scaled_probe_moment(fr, k, l, eps) == doctest::Approx(grid_val).epsilon(0.02));
  }
}

TEST_CASE("affine forward probing recovers constant coefficients") {
  std::mt19937_64 rng(7);
  const auto g = make_grid(3, 4);
  for (int n = 0; n < 3; ++n) {
    const auto c = random_coeffs(rng);
    const auto rec = affine_probe_recover(make_law(ScalarField::constant(g, 1.3), c), 0.05);
    CHECK(max_diff(rec, c) < 1e-8);
  }
  const auto c = random_coeffs(rng);
  const auto vg = ScalarField::from_function(g, [](const Point& x) { return Complex(1.0 + x[0]); });
  CHECK(code_of([&] { affine_probe_recover(make_law(vg, c), 0.05); }) == ErrorCode::InvalidParam);
  CHECK(code_of([&] {
          const auto g2 = make_grid(2, 4);
          affine_probe_recover(make_law(ScalarField::constant(g2, 1.0), QuadCoeffs(2)), 0.05);
        }) == ErrorCode::InvalidDim);
}

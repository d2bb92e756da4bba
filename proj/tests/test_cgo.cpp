#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nldtn/cgo.hpp"
#include "nldtn/error.hpp"

using namespace nldtn;
using std::numbers::pi;

namespace {

const Complex I(0.0, 1.0);

double rdot(const Real3& a, const Real3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

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

Complex box(double kappa) { return kappa == 0.0 ? Complex(1.0) : (std::exp(I * kappa) - 1.0) / (I * kappa); }

}  // namespace

TEST_CASE("frame completion") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int n = 0; n < 100; ++n) {
    const Real3 k{U(rng), U(rng), U(rng)};
    const auto [xi, eta] = complete_frame(k);
    CHECK(rdot(xi, xi) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rdot(eta, eta) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(rdot(xi, eta)) < 1e-14);
    CHECK(std::abs(rdot(xi, k)) < 1e-13);
    CHECK(std::abs(rdot(eta, k)) < 1e-13);
  }
  const auto [xi0, eta0] = complete_frame({0.0, 0.0, 0.0});
  CHECK(xi0 == Real3{0.0, 1.0, 0.0});
  CHECK(eta0 == Real3{0.0, 0.0, 1.0});
}

TEST_CASE("CGO pair invariants") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-4.0, 4.0), S(1.0, 32.0);
  for (int n = 0; n < 200; ++n) {
    const Real3 k{U(rng), U(rng), U(rng)};
    const double s = S(rng);
    const auto p = make_cgo_pair(k, s);
    CHECK(cgo_pair_defect(p) < 1e-12);
    CHECK(p.t * p.t == doctest::Approx(rdot(k, k) / 4 + s * s).epsilon(1e-14));
    CHECK(std::abs(dot(p.rho1, p.rho1, 3)) < 1e-12);
    CHECK(std::abs(dot(p.rho2, p.rho2, 3)) < 1e-12);
    for (int d = 0; d < 3; ++d) CHECK(std::abs(p.rho1[d] + p.rho2[d] - I * k[d]) < 1e-12);
  }
  CHECK(code_of([] { make_cgo_pair({1.0, 0.0, 0.0}, 2.0, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}); }) ==
        ErrorCode::InvalidParam);
  CHECK(code_of([] { make_cgo_pair({1.0, 0.0, 0.0}, 0.0); }) == ErrorCode::InvalidParam);
  const auto q = make_cgo_pair({1.0, 0.0, 0.0}, 3.0, {0.0, 0.0, 1.0}, {0.0, -1.0, 0.0});
  CHECK(cgo_pair_defect(q) < 1e-14);
}

TEST_CASE("null vectors") {
  CHECK_NOTHROW(make_null_vector(Vec{1.0, I, 0.0}));
  CHECK(code_of([] { make_null_vector(Vec{1.0, 1.0, 0.0}); }) == ErrorCode::NotNull);
  CHECK(code_of([] { make_null_vector(Vec{2.0, 2.0 * I, 0.0}); }) == ErrorCode::NotNormalized);
  for (const auto& z : stage1_zetas()) CHECK_NOTHROW(make_null_vector(z));
}

TEST_CASE("CGO fields: values, scaling and gradient") {
  const auto g = make_grid(3, 6);
  const auto p = make_cgo_pair({1.0, -0.5, 2.0}, 3.0);
  const double gamma = 2.0;
  const auto u = cgo_field(gamma, p.rho1, g);
  const auto sc = cgo_field_scaled(gamma, p.rho1, g);
  for (std::size_t n = 0; n < u.size(); ++n) {
    const Point x = g.coords(n);
    const Complex e = std::exp(p.rho1[0] * x[0] + p.rho1[1] * x[1] + p.rho1[2] * x[2]) / std::sqrt(gamma);
    CHECK(std::abs(u[n] - e) < 1e-12 * std::abs(e));
    CHECK(std::abs(std::exp(sc.log_scale) * sc.values[n] - e) < 1e-12 * std::abs(e));
    for (int d = 0; d < 3; ++d) CHECK(std::abs(sc.gradient[n][d] - p.rho1[d] * sc.values[n]) < 1e-12 * std::abs(p.t));
  }
  double peak = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) peak = std::max(peak, std::abs(sc.values[n]));
  CHECK(peak == doctest::Approx(1.0 / std::sqrt(gamma)).epsilon(1e-12));
  CHECK(code_of([&] { cgo_field(1.0, Vec{1.0, 1.0, 0.0}, g); }) == ErrorCode::NotNull);
  CHECK(code_of([&] { cgo_field(1.0, p.rho1, make_grid(2, 4)); }) == ErrorCode::InvalidDim);
}

TEST_CASE("null form and Fourier sample") {
  QuadCoeffs q(3);
  q.set(0, 0, 0, 1.0);
  q.set(0, 1, 2, 2.0);
  const Vec z{1.0, I, 0.0};
  CHECK(null_form(q, 0, z) == Complex(1.0));
  CHECK(null_form(q, 0, Vec{0.0, 1.0, I}) == Complex(0.0, 2.0));

  // Constant coefficients: the sample factorizes into one-dimensional box integrals.
  const auto g = make_grid(3, 32);
  const Real3 k{pi, 0.0, 1.0};
  const auto nz = make_null_vector(z);
  const Complex fs = fourier_sample(q, 2.0, nz, k, 0, g);
  const Complex exact = null_form(q, 0, z) / 2.0 * box(k[0]) * box(k[1]) * box(k[2]);
  CHECK(std::abs(fs - exact) < 2e-3 * std::abs(exact));
  CHECK(std::abs(fourier_sample(q, 1.0, nz, {0.0, 0.0, 0.0}, 0, g) - 1.0) < 1e-13);
}

TEST_CASE("polarized CGO form tends to the Fourier sample") {
  const auto g = make_grid(3, 16);
  QuadCoeffs q(3);
  q.set(0, 2, 2, 1.0);
  const Real3 k{pi, 0.0, 0.0};
  const auto lim = cgo_limit_form(q, 1.0, k, {8, 16, 32}, 0, g);
  REQUIRE(lim.normalized.size() == 3);
  const Complex z3 = lim.zeta.zeta[2];
  const Complex exact = z3 * z3 * box(pi);
  std::vector<double> dev;
  for (const auto& v : lim.normalized) dev.push_back(std::abs(v - exact) / std::abs(exact));
  CHECK(dev[2] < 0.02);
  CHECK(dev[2] < dev[0]);
  CHECK(std::abs(lim.extrapolated - exact) / std::abs(exact) < 0.02);
  const Complex fs = fourier_sample(q, 1.0, lim.zeta, k, 0, g);
  CHECK(std::abs(lim.normalized.back() - fs) < 0.02 * std::abs(fs));

  // Variable coefficient with a second component.
  QuadCoeffs v(3);
  v.set(1, 0, 1, 0.7);
  v.set_field(1, 0, 0, ScalarField::from_function(g, [](const Point& x) { return Complex(1 + x[0] * x[1]); }));
  const auto lv = cgo_limit_form(v, 1.0, {1.0, 2.0, 0.5}, {8, 16, 32}, 1, g);
  const Complex fv = fourier_sample(v, 1.0, lv.zeta, {1.0, 2.0, 0.5}, 1, g);
  CHECK(std::abs(lv.normalized.back() - fv) < 0.02 * std::abs(fv));

  CHECK(code_of([&] { cgo_limit_form(q, 1.0, k, {16, 8}, 0, g); }) == ErrorCode::InvalidParam);
}

TEST_CASE("stage-1 reduction and stage-2 recovery round trip") {
  std::mt19937_64 rng(6);
  for (int n = 0; n < 50; ++n) {
    const auto c = random_coeffs(rng);
    const auto samples = exact_stage1_samples(c);
    const auto s1 = stage1_reduce(samples);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(s1.offdiag[i][0] - c.at(i, 0, 1)) < 1e-14);
      CHECK(std::abs(s1.diag_diffs[i][1] - (c.at(i, 0, 0) - c.at(i, 2, 2))) < 1e-14);
    }
    const Real3 lam = stage2_recover(stage2_sample(c, 0, Vec{1.0, I, 0.0}), stage2_sample(c, 0, Vec{1.0, 0.0, I}));
    for (int i = 0; i < 3; ++i) CHECK(lam[i] == doctest::Approx(c.at(i, 0, 0)).epsilon(1e-14));
    const auto back = combine_stages(s1, lam);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (int l = k; l < 3; ++l) CHECK(std::abs(back.at(i, k, l) - c.at(i, k, l)) < 1e-12);
  }
}

TEST_CASE("stage reduction rejects inconsistent samples") {
  std::array<std::array<Complex, 3>, 3> s{};
  s[1][0] = 1.0;  // c22 - c33 = 1 while the other two differences vanish
  CHECK(code_of([&] { stage1_reduce(s); }) == ErrorCode::InconsistentSamples);
  CHECK(code_of([] { stage2_recover(Complex(1.0, 0.0), Complex(2.0, 0.0)); }) == ErrorCode::InconsistentSamples);
  const auto z = combine_stages(stage1_reduce({}), stage2_recover(0.0, 0.0));
  CHECK(z.is_zero());
  QuadCoeffs var(3);
  var.set_field(0, 0, 0, ScalarField::constant(make_grid(3, 4), 1.0));
  CHECK(code_of([&] { exact_stage1_samples(var); }) == ErrorCode::InvalidParam);
}

TEST_CASE("gradient independence of the canonical triplet") {
  const auto g = make_grid(3, 8);
  const auto z = stage1_zetas();
  const double det = independence_min_det(z, 1.0, 1.0, g);
  // det of the rows (0,1,i), (1,0,i), (1,i,0) has modulus sqrt(2); the exponential factor is >= 1.
  CHECK(det == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(independence_min_det({z[0], z[0], z[1]}, 1.0, 1.0, g) == 0.0);
  // gamma scales each v_j by gamma^{-1/2}.
  CHECK(independence_min_det(z, 1.0, 4.0, g) == doctest::Approx(std::sqrt(2.0) / 8.0).epsilon(1e-12));
}

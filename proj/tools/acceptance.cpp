// Acceptance suite: one PASS/FAIL line per criterion.
// Exit status is 0 once every criterion has been evaluated; pass --strict to
// turn any FAIL into exit status 1.
#include <Eigen/Dense>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nldtn/asymptotics.hpp"
#include "nldtn/cgo.hpp"
#include "nldtn/cli/data.hpp"
#include "nldtn/error.hpp"
#include "nldtn/extrapolation.hpp"
#include "nldtn/forward.hpp"
#include "nldtn/singular.hpp"

using namespace nldtn;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex I(0.0, 1.0);

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double max_coeff_diff(const QuadCoeffs& a, const QuadCoeffs& b) {
  double w = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int l = k; l < 3; ++l) w = std::max(w, std::abs(a.at(i, k, l) - b.at(i, k, l)));
  return w;
}

// Worst relative error over components with |ref| > floor.
double max_coeff_rel(const QuadCoeffs& got, const QuadCoeffs& ref, double floor) {
  double w = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int l = k; l < 3; ++l) {
        const double r = ref.at(i, k, l);
        if (std::abs(r) > floor) w = std::max(w, std::abs(got.at(i, k, l) - r) / std::abs(r));
      }
  return w;
}

// 1. Half-space moments against the constants pi/2, pi/4, 0 and alpha beta pi/4.
Verdict moment_constants() {
  const auto table = build_moment_table(standard_frames());
  double worst_rel = 0.0, worst_zero = 0.0;
  int listed = 0;
  for (const auto& r : table.rows) {
    double expected;
    bool check = true;
    if (r.frame.s == r.frame.t) {
      expected = r.k != r.l ? 0.0 : (r.k == r.frame.s ? kPi / 2 : kPi / 4);
    } else if (r.k == r.frame.s && r.l == r.frame.t) {
      expected = r.frame.alpha * r.frame.beta * kPi / 4;
    } else {
      check = false;  // covered below through the closed form
      expected = 0.0;
    }
    if (check) {
      ++listed;
      if (expected == 0.0) {
        worst_zero = std::max(worst_zero, std::abs(r.quadrature));
      } else {
        worst_rel = std::max(worst_rel, std::abs(r.quadrature - expected) / expected);
      }
    }
    if (r.closed_form == 0.0) {
      worst_zero = std::max(worst_zero, std::abs(r.quadrature));
    } else {
      worst_rel = std::max(worst_rel, std::abs(r.quadrature - r.closed_form) / std::abs(r.closed_form));
    }
  }
  const bool ok = table.rows.size() == 36 && worst_rel <= 1e-3 && worst_zero < 1e-4;
  return {ok, fmt("%zu rows (%d listed constants): worst rel %.2e (tol 1e-3), worst zero entry %.2e (tol 1e-4)",
                  table.rows.size(), listed, worst_rel, worst_zero)};
}

// 2. Constant-gradient family u = t x.
Verdict contraction_solver() {
  const GridSpec grid = make_grid(2, 16);
  QuadCoeffs q(2);
  q.set(0, 0, 0, 1.0);
  const MaterialLaw law = make_law(ScalarField::constant(grid, 1.0), q);
  double uerr = 0.0, lerr = 0.0;
  for (double t : {0.05, 0.1}) {
    const auto f = BoundaryTrace::from_function(grid, [&](const Point& x) { return Complex(t * x[0]); });
    const auto [u, rep] = solve_nonlinear(law, f);
    for (std::size_t n = 0; n < u.size(); ++n) uerr = std::max(uerr, std::abs(u[n] - t * grid.coords(n)[0]));
    const auto lam = dn_nonlinear(law, f);
    for (std::size_t s = 0; s < lam.size(); ++s)
      lerr = std::max(lerr, std::abs(lam[s] - lam.normal(s)[0] * (t + t * t)));
  }
  return {uerr <= 1e-8 && lerr <= 1e-8,
          fmt("t in {0.05, 0.1}: max |u - t x| %.2e, max |Lambda - nu_x (t + t^2)| %.2e (tol 1e-8)", uerr, lerr)};
}

// 3. Second-order fingerprint: O(t) decay with a cubic residual, exact without.
Verdict second_order_fingerprint() {
  const GridSpec grid = make_grid(2, 32);
  QuadCoeffs q(2);
  q.set(0, 0, 0, 1.0);
  const auto f = BoundaryTrace::from_function(grid, [](const Point& x) { return Complex(x[0]); });
  const auto with_r =
      second_order_from_data(make_law(ScalarField::constant(grid, 1.0), q, make_cutoff_residual(1.0, 1.0)), f,
                             default_t_sweep());
  const auto without = second_order_from_data(make_law(ScalarField::constant(grid, 1.0), q), f, default_t_sweep());
  double worst = 0.0;
  for (double d : without.deviations) worst = std::max(worst, d);
  const bool ok = with_r.fitted_order >= 0.8 && with_r.fitted_order <= 1.3 && worst <= 1e-8 &&
                  with_r.t_values.size() == 5 && without.t_values.size() == 5;
  return {ok, fmt("cubic residual: fitted order %.3f (band [0.8, 1.3]); R = 0, affine f: max deviation %.2e (tol 1e-8)",
                  with_r.fitted_order, worst)};
}

// 4. Boundary-volume identity gap under refinement.
Verdict identity_gap() {
  const std::vector<double> t{1.0 / 32, 1.0 / 64};
  std::vector<double> hs, gaps;
  for (int M : {16, 32, 64}) {
    const GridSpec grid = make_grid(2, M);
    QuadCoeffs q(2);
    q.set(0, 0, 0, 0.25);
    q.set(1, 0, 1, 0.125);
    q.set(0, 1, 1, -0.1);
    const auto law =
        make_law(ScalarField::from_function(grid, [](const Point& x) { return Complex(1.0 + 0.5 * x[0]); }), q);
    const auto f = BoundaryTrace::from_function(grid, [](const Point& x) { return Complex(x[0] + 0.5 * x[1]); });
    const auto g = BoundaryTrace::from_function(grid, [](const Point& x) { return Complex(x[0] - 0.3 * x[1]); });
    hs.push_back(1.0 / M);
    gaps.push_back(divergence_identity_gap(law, f, g, t).gap);
  }
  const double order = fitted_slope(hs, gaps);
  return {order >= 1.8 && gaps.back() < 1e-3,
          fmt("gaps %.2e %.2e %.2e at M = 16, 32, 64: order %.3f (min 1.8), M = 64 gap %.2e (max 1e-3)", gaps[0],
              gaps[1], gaps[2], order, gaps.back())};
}

Complex box_factor(double kappa) {
  return kappa == 0.0 ? Complex(1.0) : (std::exp(I * kappa) - 1.0) / (I * kappa);
}

// 5. CGO pair algebra and the s -> infinity limit of the polarized form.
Verdict cgo_algebra() {
  std::mt19937_64 rng(5);
  double rr = 0.0, sum = 0.0;
  auto check_pair = [&](const Real3& k, double s) {
    const CgoPair p = make_cgo_pair(k, s);
    for (const Vec* r : {&p.rho1, &p.rho2}) rr = std::max(rr, std::abs(dot(*r, *r, 3)));
    for (int d = 0; d < 3; ++d) sum = std::max(sum, std::abs(p.rho1[d] + p.rho2[d] - I * k[d]));
  };
  // Seeded pairs over the range the experiments use: |k_d| <= 4, s in [1, 32].
  for (int n = 0; n < 200; ++n) {
    Real3 k;
    for (double& v : k) v = 8.0 * (cli::uniform01(rng) - 0.5);
    check_pair(k, 1.0 + 31.0 * cli::uniform01(rng));
  }

  const GridSpec grid = make_grid(3, 16);
  struct Case {
    Real3 k;
    int i;
    QuadCoeffs q;
  };
  std::vector<Case> cases;
  {
    QuadCoeffs q(3);
    q.set(0, 2, 2, 1.0);
    cases.push_back({{kPi, 0, 0}, 0, q});
  }
  {
    QuadCoeffs q(3);
    q.set(1, 0, 1, 0.7);
    q.set(1, 1, 2, -0.4);
    q.set_field(1, 0, 0, ScalarField::from_function(grid, [](const Point& x) { return Complex(1 + x[0] * x[1]); }));
    cases.push_back({{1.0, 2.0, 0.5}, 1, q});
  }
  {
    QuadCoeffs q(3);
    q.set(2, 0, 0, 0.5);
    q.set(2, 2, 2, -0.8);
    q.set_field(2, 1, 2, ScalarField::from_function(grid, [](const Point& x) { return Complex(std::sin(x[2]) + 0.3); }));
    cases.push_back({{0, 0, 2.0}, 2, q});
  }
  const std::vector<double> s{8, 16, 32};
  double worst = 0.0, oracle = 0.0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    for (double sv : s) check_pair(cases[c].k, sv);
    const auto lim = cgo_limit_form(cases[c].q, 1.0, cases[c].k, s, cases[c].i, grid);
    const Complex fs = fourier_sample(cases[c].q, 1.0, lim.zeta, cases[c].k, cases[c].i, grid);
    worst = std::max(worst, std::abs(lim.normalized.back() - fs) / std::abs(fs));
    if (c == 0) {
      // Constant c^1_33: the sample is c^1_33 zeta_3^2 (e^{i pi} - 1)/(i pi).
      const Complex z3 = lim.zeta.zeta[2];
      const Complex exact = z3 * z3 * box_factor(kPi);
      oracle = std::abs(lim.normalized.back() - exact) / std::abs(exact);
    }
  }
  const bool ok = rr < 1e-12 && sum < 1e-12 && worst <= 0.02 && oracle <= 0.02;
  return {ok, fmt("max |rho.rho| %.1e, max |rho1 + rho2 - ik| %.1e (tol 1e-12); s = 32 vs fourier_sample worst %.2e, "
                  "closed-form oracle %.2e (tol 2e-2)",
                  rr, sum, worst, oracle)};
}

// 6. CGO-sample reduction round trip.
Verdict stage_round_trip() {
  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const QuadCoeffs c = cli::random_constant_coeffs(rng, 3, 0.0, 2.0);
    const auto s1 = stage1_reduce(exact_stage1_samples(c));
    const Real3 lam = stage2_recover(stage2_sample(c, 0, Vec{1.0, I, 0.0}), stage2_sample(c, 0, Vec{1.0, 0.0, I}));
    worst = std::max(worst, max_coeff_diff(combine_stages(s1, lam), c));
  }
  const QuadCoeffs zero(3);
  const auto s1 = stage1_reduce(std::array<std::array<Complex, 3>, 3>{});
  const QuadCoeffs z = combine_stages(s1, stage2_recover(0.0, 0.0));
  const double zmax = max_coeff_diff(z, zero);
  return {worst <= 1e-10 && zmax == 0.0,
          fmt("100 seeded sets: worst abs error %.2e (tol 1e-10); zero samples give max |c| = %.1e", worst, zmax)};
}

// 7. Moment recovery: closed form, quadrature + eps pipeline, affine oracle.
Verdict moment_recovery() {
  std::mt19937_64 rng(7);
  const QuadCoeffs c = cli::random_constant_coeffs(rng, 3, 0.2, 1.2);
  const auto frames = standard_frames();
  const double closed = max_coeff_diff(assemble_and_recover(closed_form_measurements(c, frames), frames).coeffs, c);

  // Any (frame, j) sweep without a stable fit leaves the pipeline without a result.
  const std::vector<double> eps{0.1, 0.05, 0.025};
  std::map<std::pair<int, int>, double> meas;
  int unstable = 0;
  for (std::size_t f = 0; f < frames.size(); ++f)
    for (int j = 0; j < 3; ++j) {
      std::vector<double> v;
      for (double e : eps) v.push_back(scaled_probe_integral(c, frames[f], j, e));
      try {
        meas[{static_cast<int>(f), j}] = eps_limit(eps, v).value;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonMonotone) throw;
        ++unstable;
      }
    }
  std::optional<QuadCoeffs> pipe;
  if (unstable == 0) pipe = assemble_and_recover(meas, frames).coeffs;
  const double pipe_rel = pipe ? max_coeff_rel(*pipe, c, 0.1) : INFINITY;

  const GridSpec grid = make_grid(3, 4);
  const QuadCoeffs orc = affine_probe_recover(make_law(ScalarField::constant(grid, 1.3), c), 0.05);
  const double orc_rel = max_coeff_rel(orc, c, 0.1);
  const double cross = pipe ? max_coeff_rel(*pipe, orc, 0.1) : INFINITY;

  const bool ok = closed <= 1e-10 && pipe_rel <= 0.05 && orc_rel <= 0.05 && cross <= 0.05;
  return {ok, fmt("closed form abs %.2e (tol 1e-10); eps pipeline: %d of 18 sweeps without a stable fit, worst rel %.3f "
                  "(tol 0.05); affine oracle rel %.2e (tol 0.05); pipeline vs oracle rel %.3f (tol 0.05)",
                  closed, unstable, pipe_rel, orc_rel, cross)};
}

// 8. Gradient independence of the canonical CGO triplet.
Verdict independence() {
  const GridSpec grid = make_grid(3, 8);
  const auto z = stage1_zetas();
  const double det = independence_min_det(z, 1.0, 1.0, grid);
  // |det grad v| = |det(zeta)| e^{t Re(sum zeta) . x}; Re(sum zeta) >= 0 here, so the minimum sits at x = 0.
  Eigen::Matrix3cd Z;
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 3; ++col) Z(r, col) = z[r][col];
  const double analytic = std::abs(Z.determinant());
  const double degenerate = independence_min_det({z[0], z[0], z[1]}, 1.0, 1.0, grid);
  return {det >= 1.0 && std::abs(det - analytic) < 1e-12 && degenerate == 0.0,
          fmt("canonical triplet min |det| %.6f (analytic %.6f, floor 1.0); degenerate triplet %.1e", det, analytic,
              degenerate)};
}

// 9. Flux conservation for five seeded data.
Verdict conservation() {
  std::mt19937_64 rng(9);
  std::vector<cli::Datum> data;
  for (int n = 0; n < 5; ++n) data.push_back(cli::random_trig_datum(rng, 2, 0.1));
  double lin = 0.0, cons = 0.0, min_order = INFINITY;
  for (const auto& d : data) {
    std::vector<double> hs, pw;
    for (int M : {32, 64, 128}) {
      const GridSpec grid = make_grid(2, M);
      QuadCoeffs q(2);
      q.set(0, 0, 0, 1.0);
      q.set(1, 0, 1, 0.5);
      q.set(0, 1, 1, -0.4);
      const auto law =
          make_law(ScalarField::from_function(grid, [](const Point& x) { return Complex(1.0 + 0.5 * x[0]); }), q);
      const auto f = d.trace(grid);
      const auto one = BoundaryTrace::from_function(grid, [](const Point&) { return Complex(1.0); });
      lin = std::max(lin, std::abs(integrate_boundary(dn_linear(law.gamma, f), one)));
      // Picard run to 1e-14 so the fixed-point residual does not mask the balance.
      ForwardOptions opts;
      opts.tol = 1e-14;
      const auto [u, rep] = solve_nonlinear(law, f, opts);
      const FluxOperator op(law.gamma);
      const VectorField W = nonlinear_flux(law, u);
      cons = std::max(cons, std::abs(integrate_boundary(boundary_flux(op, u, &W), one)));
      hs.push_back(1.0 / M);
      pw.push_back(std::abs(integrate_boundary(boundary_flux(op, u, &W, FluxExtraction::Pointwise), one)));
    }
    min_order = std::min(min_order, fitted_slope(hs, pw));
  }
  // The conservative extraction closes the discrete divergence theorem, so
  // int Lambda_C sits at round-off for every h.
  return {lin <= 1e-12 && cons <= 1e-12,
          fmt("M = 32, 64, 128: max |int Lambda_gamma| %.1e, max |int Lambda_C| %.1e (tol 1e-12); "
              "pointwise-extraction order min %.2f (diagnostic)",
              lin, cons, min_order)};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"moment constants", moment_constants},
      {"contraction solver", contraction_solver},
      {"second-order fingerprint", second_order_fingerprint},
      {"boundary-volume identity", identity_gap},
      {"CGO algebra", cgo_algebra},
      {"stage round trip", stage_round_trip},
      {"moment recovery", moment_recovery},
      {"gradient independence", independence},
      {"conservation", conservation},
  };
  int failed = 0;
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[n].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.pass;
    std::printf("%s %zu %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", n + 1, criteria[n].first, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return strict && failed > 0 ? 1 : 0;
}

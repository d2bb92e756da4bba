#include "nldtn/cgo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nldtn/asymptotics.hpp"
#include "nldtn/error.hpp"
#include "nldtn/extrapolation.hpp"

namespace nldtn {

namespace {

constexpr Complex I{0.0, 1.0};

double dot3(const Real3& a, const Real3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm3(const Real3& a) { return std::sqrt(dot3(a, a)); }

Real3 cross(const Real3& a, const Real3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Complex bdot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void require_3d(const GridSpec& grid) {
  if (grid.dim() != 3 || grid.kind() != DomainKind::UnitCube)
    throw Error(ErrorCode::InvalidDim, "CGO probes need a 3-D cube grid");
}

// Largest value of Re(rho . x) on the closed unit cube.
double peak_on_cube(const Vec& rho) {
  double p = 0.0;
  for (int d = 0; d < 3; ++d) p += std::max(0.0, rho[d].real());
  return p;
}

}  // namespace

std::pair<Real3, Real3> complete_frame(const Real3& k) {
  const double nk = norm3(k);
  if (nk == 0.0) return {Real3{0, 1, 0}, Real3{0, 0, 1}};
  const Real3 kh{k[0] / nk, k[1] / nk, k[2] / nk};
  Real3 a{};
  for (int d = 0; d < 3; ++d) {
    if (std::abs(kh[d]) < 0.9) {
      a = Real3{};
      a[d] = 1.0;
      break;
    }
  }
  const double ak = dot3(a, kh);
  Real3 xi{a[0] - ak * kh[0], a[1] - ak * kh[1], a[2] - ak * kh[2]};
  const double nx = norm3(xi);
  for (double& v : xi) v /= nx;
  return {xi, cross(kh, xi)};
}

CgoPair make_cgo_pair(const Real3& k, double s, const Real3& xi, const Real3& eta) {
  if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidParam, "s must be positive");
  const double scale = std::max(1.0, norm3(k));
  if (std::abs(norm3(xi) - 1.0) > 1e-12 || std::abs(norm3(eta) - 1.0) > 1e-12 ||
      std::abs(dot3(xi, eta)) > 1e-12 || std::abs(dot3(k, xi)) > 1e-12 * scale ||
      std::abs(dot3(k, eta)) > 1e-12 * scale)
    throw Error(ErrorCode::InvalidParam, "xi, eta must be orthonormal and orthogonal to k");
  CgoPair p;
  p.k = k;
  p.xi = xi;
  p.eta = eta;
  p.s = s;
  p.t = std::sqrt(0.25 * dot3(k, k) + s * s);
  for (int d = 0; d < 3; ++d) {
    p.rho1[d] = p.t * eta[d] + I * (0.5 * k[d] + s * xi[d]);
    p.rho2[d] = -p.t * eta[d] + I * (0.5 * k[d] - s * xi[d]);
  }
  return p;
}

CgoPair make_cgo_pair(const Real3& k, double s) {
  const auto [xi, eta] = complete_frame(k);
  return make_cgo_pair(k, s, xi, eta);
}

double cgo_pair_defect(const CgoPair& p) {
  double d = 0.0;
  d = std::max(d, std::abs(dot3(p.k, p.xi)));
  d = std::max(d, std::abs(dot3(p.k, p.eta)));
  d = std::max(d, std::abs(dot3(p.xi, p.eta)));
  d = std::max(d, std::abs(p.t * p.t - 0.25 * dot3(p.k, p.k) - p.s * p.s) / std::max(1.0, p.t * p.t));
  d = std::max(d, std::abs(bdot(p.rho1, p.rho1)));
  d = std::max(d, std::abs(bdot(p.rho2, p.rho2)));
  for (int c = 0; c < 3; ++c) d = std::max(d, std::abs(p.rho1[c] + p.rho2[c] - I * p.k[c]));
  return d;
}

NullVector make_null_vector(const Vec& zeta, double tol) {
  if (std::abs(bdot(zeta, zeta)) > tol) throw Error(ErrorCode::NotNull, "zeta . zeta must vanish");
  const double n2 = std::norm(zeta[0]) + std::norm(zeta[1]) + std::norm(zeta[2]);
  if (std::abs(n2 - 2.0) > tol) throw Error(ErrorCode::NotNormalized, "|zeta| must equal sqrt(2)");
  return NullVector{zeta};
}

ScalarField cgo_field(double gamma, const Vec& rho, const GridSpec& grid) {
  require_3d(grid);
  if (!(gamma > 0.0)) throw Error(ErrorCode::NotPositive, "gamma must be positive");
  if (std::abs(bdot(rho, rho)) > 1e-10) throw Error(ErrorCode::NotNull, "rho . rho must vanish");
  const double amp = 1.0 / std::sqrt(gamma);
  return ScalarField::from_function(grid, [&](const Point& x) {
    return amp * std::exp(rho[0] * x[0] + rho[1] * x[1] + rho[2] * x[2]);
  });
}

ScaledCgo cgo_field_scaled(double gamma, const Vec& rho, const GridSpec& grid) {
  require_3d(grid);
  if (!(gamma > 0.0)) throw Error(ErrorCode::NotPositive, "gamma must be positive");
  if (std::abs(bdot(rho, rho)) > 1e-10 * std::max(1.0, std::norm(rho[0]) + std::norm(rho[1]) + std::norm(rho[2])))
    throw Error(ErrorCode::NotNull, "rho . rho must vanish");
  const double peak = peak_on_cube(rho);
  double low = 0.0;
  for (int d = 0; d < 3; ++d) low += std::min(0.0, rho[d].real());
  // The scaled values span exp(low - peak) .. 1; keep them representable.
  if (peak - low > 700.0) throw Error(ErrorCode::NumericRange, "CGO dynamic range exceeds double precision");
  const double amp = 1.0 / std::sqrt(gamma);
  ScaledCgo out{ScalarField(grid), VectorField(grid), peak};
  for (std::size_t n = 0; n < grid.num_nodes(); ++n) {
    const Point x = grid.coords(n);
    const Complex v = amp * std::exp(rho[0] * x[0] + rho[1] * x[1] + rho[2] * x[2] - peak);
    out.values[n] = v;
    for (int d = 0; d < 3; ++d) out.gradient[n][d] = rho[d] * v;
  }
  return out;
}

Complex null_form(const QuadCoeffs& quad, int i, const Vec& zeta, std::size_t node) {
  Complex acc = 0.0;
  for (int j = 0; j < quad.dim(); ++j)
    for (int l = j; l < quad.dim(); ++l) acc += quad.at(i, j, l, node) * zeta[j] * zeta[l];
  return acc;
}

Complex fourier_sample(const QuadCoeffs& quad, double gamma, const NullVector& zeta, const Real3& k, int i,
                       const GridSpec& grid) {
  require_3d(grid);
  if (!(gamma > 0.0)) throw Error(ErrorCode::NotPositive, "gamma must be positive");
  ScalarField dens(grid);
  for (std::size_t n = 0; n < grid.num_nodes(); ++n) {
    const Point x = grid.coords(n);
    dens[n] = null_form(quad, i, zeta.zeta, quad.is_constant() ? 0 : n) / gamma *
              std::exp(I * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
  }
  return integrate_volume(dens);
}

CgoLimitResult cgo_limit_form(const QuadCoeffs& quad, double gamma, const Real3& k, const std::vector<double>& s_list,
                              int i, const GridSpec& grid) {
  require_3d(grid);
  if (s_list.empty()) throw Error(ErrorCode::InvalidParam, "empty s list");
  for (std::size_t m = 1; m < s_list.size(); ++m)
    if (!(s_list[m] > s_list[m - 1])) throw Error(ErrorCode::InvalidParam, "s values must increase");

  CgoLimitResult res;
  const auto [xi, eta] = complete_frame(k);
  res.zeta.zeta = {Complex(eta[0], xi[0]), Complex(eta[1], xi[1]), Complex(eta[2], xi[2])};

  VectorField grad_v(grid);
  for (std::size_t n = 0; n < grid.num_nodes(); ++n) grad_v[n][i] = 1.0;

  for (double s : s_list) {
    const CgoPair p = make_cgo_pair(k, s, xi, eta);
    const ScaledCgo u1 = cgo_field_scaled(gamma, p.rho1, grid);
    const ScaledCgo u2 = cgo_field_scaled(gamma, p.rho2, grid);
    // Gradients are taken in closed form; finite differences cannot resolve
    // e^{rho . x} once |rho| h is O(1).
    const Complex scaled = trilinear_form(quad, u1.gradient, u2.gradient, grad_v);
    const Complex form = scaled * std::exp(u1.log_scale + u2.log_scale);
    res.s_values.push_back(s);
    res.normalized.push_back(form / (-2.0 * s * s));
  }

  const std::size_t n = res.normalized.size();
  if (n == 1) {
    res.extrapolated = res.normalized[0];
    res.fitted_p = 1.0;
    return res;
  }
  double p = 1.0;
  if (n >= 3) {
    const Complex d1 = res.normalized[n - 2] - res.normalized[n - 3];
    const Complex d2 = res.normalized[n - 1] - res.normalized[n - 2];
    const double ratio = res.s_values[n - 1] / res.s_values[n - 2];
    if (std::abs(d2) == 0.0) {
      res.extrapolated = res.normalized[n - 1];
      res.fitted_p = std::numeric_limits<double>::infinity();
      return res;
    }
    const double fit = std::log(std::abs(d1) / std::abs(d2)) / std::log(ratio);
    if (std::isfinite(fit) && fit > 0.0) p = fit;
  }
  res.fitted_p = p;
  res.extrapolated = richardson(1.0 / res.s_values[n - 2], res.normalized[n - 2], 1.0 / res.s_values[n - 1],
                                res.normalized[n - 1], p);
  return res;
}

std::array<Vec, 3> stage1_zetas() {
  return {Vec{0.0, 1.0, I}, Vec{1.0, 0.0, I}, Vec{1.0, I, 0.0}};
}

Stage1Result stage1_reduce(const std::array<std::array<Complex, 3>, 3>& samples, double tol) {
  Stage1Result r;
  for (int i = 0; i < 3; ++i) {
    const Complex a = samples[i][0];  // c22 - c33 + i c23
    const Complex b = samples[i][1];  // c11 - c33 + i c13
    const Complex c = samples[i][2];  // c11 - c22 + i c12
    const double scale = std::max({1.0, std::abs(a.real()), std::abs(b.real()), std::abs(c.real())});
    if (std::abs(c.real() + a.real() - b.real()) > tol * scale)
      throw Error(ErrorCode::InconsistentSamples, "diagonal differences do not close");
    r.offdiag[i] = {c.imag(), b.imag(), a.imag()};
    r.diag_diffs[i] = {c.real(), b.real()};
  }
  return r;
}

Complex stage2_sample(const QuadCoeffs& quad, int j, const Vec& zeta) {
  Complex acc = 0.0;
  for (int i = 0; i < quad.dim(); ++i) acc += zeta[i] * quad.at(i, j, j);
  return zeta[j] * acc;
}

Real3 stage2_recover(Complex d1_a, Complex d1_b, double tol) {
  const double scale = std::max({1.0, std::abs(d1_a.real()), std::abs(d1_b.real())});
  if (std::abs(d1_a.real() - d1_b.real()) > tol * scale)
    throw Error(ErrorCode::InconsistentSamples, "real parts of the two stage-2 samples differ");
  return {d1_a.real(), d1_a.imag(), d1_b.imag()};
}

QuadCoeffs combine_stages(const Stage1Result& s1, const Real3& lambda) {
  QuadCoeffs c(3);
  for (int i = 0; i < 3; ++i) {
    c.set(i, 0, 0, lambda[i]);
    c.set(i, 1, 1, lambda[i] - s1.diag_diffs[i][0]);
    c.set(i, 2, 2, lambda[i] - s1.diag_diffs[i][1]);
    c.set(i, 0, 1, s1.offdiag[i][0]);
    c.set(i, 0, 2, s1.offdiag[i][1]);
    c.set(i, 1, 2, s1.offdiag[i][2]);
  }
  return c;
}

std::array<std::array<Complex, 3>, 3> exact_stage1_samples(const QuadCoeffs& quad) {
  if (quad.dim() != 3 || !quad.is_constant())
    throw Error(ErrorCode::InvalidParam, "exact samples need constant 3-D coefficients");
  std::array<std::array<Complex, 3>, 3> out{};
  const auto z = stage1_zetas();
  for (int i = 0; i < 3; ++i)
    for (int m = 0; m < 3; ++m) out[i][m] = null_form(quad, i, z[m]);
  return out;
}

double independence_min_det(const std::array<Vec, 3>& triplet, double t, double gamma, const GridSpec& grid) {
  require_3d(grid);
  if (!(gamma > 0.0)) throw Error(ErrorCode::NotPositive, "gamma must be positive");
  const double amp = 1.0 / std::sqrt(gamma);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < grid.num_nodes(); ++n) {
    const Point x = grid.coords(n);
    std::array<Vec, 3> g;
    for (int j = 0; j < 3; ++j) {
      const Vec& z = triplet[j];
      const Complex v = amp * std::exp(t * (z[0] * x[0] + z[1] * x[1] + z[2] * x[2]));
      for (int d = 0; d < 3; ++d) g[j][d] = t * z[d] * v;
    }
    const Complex det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                        g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                        g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    best = std::min(best, std::abs(det));
  }
  return best;
}

}  // namespace nldtn

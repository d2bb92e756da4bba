#pragma once

#include <array>
#include <vector>

#include "nldtn/grid.hpp"
#include "nldtn/material.hpp"

namespace nldtn {

using Real3 = std::array<double, 3>;

// rho1 = t eta + i(k/2 + s xi), rho2 = -t eta + i(k/2 - s xi), t^2 = |k|^2/4 + s^2.
struct CgoPair {
  Real3 k{};
  Real3 xi{};
  Real3 eta{};
  double s = 0.0;
  double t = 0.0;
  Vec rho1{};
  Vec rho2{};
};

// Orthonormal completion of k: a is the first basis vector with |a . k^| < 0.9,
// xi = normalize(a - (a . k^) k^), eta = k^ x xi. For k = 0, xi = e2, eta = e3.
std::pair<Real3, Real3> complete_frame(const Real3& k);

CgoPair make_cgo_pair(const Real3& k, double s);
// Explicit xi, eta (must be orthonormal and orthogonal to k; InvalidParam otherwise).
CgoPair make_cgo_pair(const Real3& k, double s, const Real3& xi, const Real3& eta);

// Largest violation of the pair invariants (orthogonality, t^2, rho.rho, rho1 + rho2 = ik).
double cgo_pair_defect(const CgoPair& p);

// zeta . zeta = 0 and |zeta| = sqrt(2).
struct NullVector {
  Vec zeta{};
};
NullVector make_null_vector(const Vec& zeta, double tol = 1e-12);

// gamma^{-1/2} e^{rho . x}; NotNull if |rho . rho| > 1e-10.
ScalarField cgo_field(double gamma, const Vec& rho, const GridSpec& grid);

// Same field with the peak of Re(rho . x) over the closed cube factored out:
// field = exp(log_scale) * values, gradient = rho * field.
struct ScaledCgo {
  ScalarField values;
  VectorField gradient;
  double log_scale = 0.0;
};
ScaledCgo cgo_field_scaled(double gamma, const Vec& rho, const GridSpec& grid);

// q_i(zeta, x) = sum_{j<=l} zeta_j zeta_l c^i_{jl}(x).
Complex null_form(const QuadCoeffs& quad, int i, const Vec& zeta, std::size_t node = 0);

// int q_i(zeta, x) gamma^{-1} e^{ik.x} dx on a 3-D cube grid.
Complex fourier_sample(const QuadCoeffs& quad, double gamma, const NullVector& zeta, const Real3& k, int i,
                       const GridSpec& grid);

struct CgoLimitResult {
  std::vector<double> s_values;
  std::vector<Complex> normalized;  // form(s) / (-2 s^2)
  Complex extrapolated;
  double fitted_p = 0.0;  // observed decay exponent of the s sweep (1 if fewer than 3 samples)
  NullVector zeta;        // eta + i xi of the pairs used
};

// trilinear_form(quad, u(rho1), u(rho2), x_i) / (-2 s^2) for each s, extrapolated s -> infinity.
CgoLimitResult cgo_limit_form(const QuadCoeffs& quad, double gamma, const Real3& k, const std::vector<double>& s_list,
                              int i, const GridSpec& grid);

// Null vectors used by the reduction, in this order: (0,1,i), (1,0,i), (1,i,0).
std::array<Vec, 3> stage1_zetas();

struct Stage1Result {
  // per i: (c12, c13, c23)
  std::array<std::array<double, 3>, 3> offdiag{};
  // per i: (c11 - c22, c11 - c33)
  std::array<std::array<double, 2>, 3> diag_diffs{};
  bool residual_kernel = true;
};

// samples[i][m] = q_i(stage1_zetas()[m]).
Stage1Result stage1_reduce(const std::array<std::array<Complex, 3>, 3>& samples, double tol = 1e-9);

// d_j(zeta) = zeta_j sum_i zeta_i c^i_{jj}
Complex stage2_sample(const QuadCoeffs& quad, int j, const Vec& zeta);

// From d_1 at (1,i,0) and (1,0,i): lambda = (c^1_11, c^2_11, c^3_11).
Real3 stage2_recover(Complex d1_a, Complex d1_b, double tol = 1e-9);

// Full coefficient set from stage-1 data and lambda^i = c^i_11.
QuadCoeffs combine_stages(const Stage1Result& s1, const Real3& lambda);

// Exact samples of a constant coefficient set (for round trips).
std::array<std::array<Complex, 3>, 3> exact_stage1_samples(const QuadCoeffs& quad);

// min over nodes of |det(grad v_j)| with v_j = gamma^{-1/2} e^{t zeta_j . x}.
double independence_min_det(const std::array<Vec, 3>& triplet, double t, double gamma, const GridSpec& grid);

}  // namespace nldtn

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nldtn/cgo.hpp"
#include "nldtn/material.hpp"

namespace nldtn {

// Orthonormal frame (N, T1, T2) selected by the axis pair s <= t (0-based).
struct ProbeFrame {
  int s = 0;
  int t = 0;
  double alpha = 1.0;
  double beta = 0.0;
  Real3 N{};
  Real3 T1{};
  Real3 T2{};
};

// s < t: N = alpha e_s + beta e_t, T2 = beta e_s - alpha e_t, T1 = e_k (k not in {s,t}).
// s = t: N = e_s, (T1, T2) the remaining axes in increasing order; alpha, beta ignored.
ProbeFrame probe_frame(int s, int t, double alpha = 1.0, double beta = 0.0);

// The three (s,s) frames followed by (0,1), (0,2), (1,2) with alpha = beta = 1/sqrt(2).
std::vector<ProbeFrame> standard_frames();

struct HalfSpaceRule {
  int n_theta = 48;  // Gauss-Legendre nodes in theta (eta3 = tan theta)
  int n_psi = 48;    // Gauss-Legendre nodes in psi (rho = (eta3 + 1) tan psi)
  int n_phi = 16;    // trapezoid nodes in the azimuth
};

// int_{eta3 > 0} w_k w_l / |w|^6 deta with w = eta1 T1 + eta2 T2 - (eta3 + 1) N.
double half_space_moment(const ProbeFrame& frame, int k, int l, const HalfSpaceRule& rule = {});
// int eta1^2 / |w|^6 and int (eta3 + 1)^2 / |w|^6 (closed forms pi/4 and pi/2).
double half_space_base_a(const HalfSpaceRule& rule = {});
double half_space_base_b(const HalfSpaceRule& rule = {});

// (pi/4)(delta_kl + N_k N_l), i.e. A (T1 T1 + T2 T2)_kl + B (N N)_kl.
double closed_form_moment(const ProbeFrame& frame, int k, int l);

struct MomentRow {
  ProbeFrame frame;
  int k = 0;
  int l = 0;
  double quadrature = 0.0;
  double closed_form = 0.0;
  double rel_err = 0.0;  // absolute error when the closed form is 0
};

struct MomentTable {
  std::vector<MomentRow> rows;
  // Columns frame_s, frame_t, alpha, beta, k, l, quadrature, closed_form, rel_err
  // with 1-based axis indices.
  std::string to_csv() const;
};

MomentTable build_moment_table(const std::vector<ProbeFrame>& frames, const HalfSpaceRule& rule = {});

struct ProbeRule {
  int panels = 24;        // geometric panels in cos(theta) toward the grazing direction
  int nodes_per_panel = 12;
  int n_phi = 16;
  double target = 1e-8;   // relative agreement required between the rule and its half-size version
};

// eps * sum_{k<=l} c^j_{kl} int_B d_k G d_l G dx with G = |x - eps N|^{-1} and B
// the unit ball centred at -N (tangent to the origin, outward normal N there).
// The radial integral along rays from the pole is done in closed form.
double scaled_probe_integral(const QuadCoeffs& quad, const ProbeFrame& frame, int j, double eps,
                             const ProbeRule& rule = {});
// Single moment eps int_B d_k G d_l G dx.
double scaled_probe_moment(const ProbeFrame& frame, int k, int l, double eps, const ProbeRule& rule = {});

struct EpsLimit {
  double value = 0.0;
  double order = 1.0;
};

// Richardson limit of values sampled at halving eps with error ~ eps^p, p
// fitted from the last three samples (p = 1 with only two).
EpsLimit eps_limit(const std::vector<double>& eps, const std::vector<double>& values);

struct Recovery {
  QuadCoeffs coeffs{3};
  double condition = 0.0;  // 2-norm condition number of the moment matrix
};

// measurements[(frame index, j)] = limit value of the scaled probe integral.
Recovery assemble_and_recover(const std::map<std::pair<int, int>, double>& measurements,
                              const std::vector<ProbeFrame>& frames, double max_condition = 1e6);

// Measurements a coefficient set produces under the closed-form moments.
std::map<std::pair<int, int>, double> closed_form_measurements(const QuadCoeffs& quad,
                                                               const std::vector<ProbeFrame>& frames);

// Independent check through the forward solver: affine data f = tau q . x on
// a 3-D cube gives Lambda_C(f) = nu . (gamma tau q + tau^2 P(q)) exactly for a
// constant law, from which each P(e_k + e_l) and hence every c^i_{kl} is read.
QuadCoeffs affine_probe_recover(const MaterialLaw& law, double tau);

}  // namespace nldtn

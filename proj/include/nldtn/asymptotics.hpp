#pragma once

#include <vector>

#include "nldtn/forward.hpp"

namespace nldtn {

// Second-order term u2: div(gamma grad u2) = -div P(x, grad u1), u2 = 0 on the boundary.
ScalarField solve_u2(const ScalarField& gamma, const QuadCoeffs& quad, const ScalarField& u1,
                     const SolverOptions& opts = {1e-12, 0});

// nu . [gamma grad u2 + P(x, grad u1)] with the same flux extraction as the DN maps.
BoundaryTrace second_order_reference(const ScalarField& gamma, const QuadCoeffs& quad, const BoundaryTrace& f,
                                     const ForwardOptions& opts = {});

struct ExpansionResult {
  std::vector<double> t_values;          // strictly decreasing
  std::vector<BoundaryTrace> traces;     // D(t) = (Lambda_C(tf) - t Lambda_gamma f) / t^2
  std::vector<double> deviations;        // ||D(t) - reference||_inf
  std::vector<double> first_order;       // ||(Lambda_C(tf) - t Lambda_gamma f) / t||_inf
  BoundaryTrace extrapolated;            // first-order Richardson on the two smallest t
  BoundaryTrace reference;
  double fitted_order = 0.0;             // slope of log deviation vs log t (NaN if all zero)
  std::vector<double> failed_t;          // t values dropped for NonContraction
};

// Runs the t sweep. t values that fail to contract are dropped from the large
// end; NonContraction is rethrown if fewer than two values survive.
ExpansionResult second_order_from_data(const MaterialLaw& law, const BoundaryTrace& f,
                                       const std::vector<double>& t_list, const ForwardOptions& opts = {});

// 2^{-3}, ..., 2^{-7}
std::vector<double> default_t_sweep();

// Discrete H1 norm sqrt(int |w|^2 + |grad w|^2) on the cube.
double discrete_h1_norm(const ScalarField& w);

// ||v^(t) - u2||_{H1} with v^(t) = (u(tf)/t - u1)/t.
double expansion_remainder(const MaterialLaw& law, const BoundaryTrace& f, double t,
                           const ForwardOptions& opts = {});

// int P(x, grad u1) . grad v dx (bilinear dot product).
Complex volume_form(const QuadCoeffs& quad, const ScalarField& u1, const ScalarField& v);

// int polarized_p(x, grad u1, grad u2) . grad v dx.
Complex trilinear_form(const QuadCoeffs& quad, const ScalarField& u1, const ScalarField& u2, const ScalarField& v);
// Same with the gradients supplied directly (e.g. in closed form).
Complex trilinear_form(const QuadCoeffs& quad, const VectorField& grad_u1, const VectorField& grad_u2,
                       const VectorField& grad_v);

struct IdentityGap {
  Complex boundary;  // int_{dOmega} (limit of D(t)) g dsigma
  Complex volume;    // int P(grad u1) . grad v
  double gap = 0.0;
  ExpansionResult expansion;
};

// v is the linear solution with boundary data g.
IdentityGap divergence_identity_gap(const MaterialLaw& law, const BoundaryTrace& f, const BoundaryTrace& g,
                                    const std::vector<double>& t_list, const ForwardOptions& opts = {});

}  // namespace nldtn

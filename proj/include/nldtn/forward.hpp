#pragma once

#include <vector>

#include "nldtn/elliptic.hpp"
#include "nldtn/grid.hpp"
#include "nldtn/material.hpp"

namespace nldtn {

// How boundary fluxes are read off a discrete solution.
//
// Conservative: half-cell flux balance of the full discrete operator
//   L_h u + D_h W = 0,
// so the boundary integral of the extracted flux equals the sum of interior
// residuals (zero up to the linear-solver residual). Second order on face
// interiors.
//
// Pointwise: nu . C(x, G_h u) with one-sided second-order gradients at the
// boundary node. Not conservative; its boundary integral is an O(h^2)
// consistency measure.
enum class FluxExtraction { Conservative, Pointwise };

struct ForwardOptions {
  double tol = 1e-12;  // L-infinity norm of the Picard update
  int max_iter = 200;
  SolverOptions linear{1e-12, 0};
  FluxExtraction extraction = FluxExtraction::Conservative;
};

struct ContractionReport {
  int picard_iterations = 0;
  double final_update_norm = 0.0;
  bool diverged = false;
  std::vector<double> update_norms;
  int linear_iterations = 0;
};

// u = u0 + v with u0 the linear solution and v the fixed point of
//   v -> -L^{-1} div Q(grad(u0 + v)).
// Throws NonContraction when update norms grow three times in a row, become
// non-finite, or max_iter is reached.
std::pair<ScalarField, ContractionReport> solve_nonlinear(const MaterialLaw& law, const BoundaryTrace& f,
                                                          const ForwardOptions& opts = {});
std::pair<ScalarField, ContractionReport> solve_nonlinear(const MaterialLaw& law, const BoundaryTrace& f,
                                                          double tol, int max_iter);

// Boundary flux of gamma grad u + W. W may be null (linear flux).
BoundaryTrace boundary_flux(const FluxOperator& op, const ScalarField& u, const VectorField* W,
                            FluxExtraction extraction = FluxExtraction::Conservative);

BoundaryTrace dn_linear(const ScalarField& gamma, const BoundaryTrace& f, const ForwardOptions& opts = {});
BoundaryTrace dn_nonlinear(const MaterialLaw& law, const BoundaryTrace& f, const ForwardOptions& opts = {});

// Nodal Q(x, G_h u).
VectorField nonlinear_flux(const MaterialLaw& law, const ScalarField& u);

}  // namespace nldtn

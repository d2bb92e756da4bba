#pragma once

#include <utility>
#include <vector>

#include "nldtn/grid.hpp"

namespace nldtn {

struct SolverOptions {
  double rel_tol = 1e-10;
  // 0 selects the default cap 20 * sqrt(unknowns) * dim.
  int max_iter = 0;
};

struct LinearSolveReport {
  int iterations = 0;
  double final_residual = 0.0;  // relative to the right-hand side norm
  double tolerance = 0.0;
};

// Discrete divergence-form operator
//   (L u)_n = sum_d [g_{n+d/2}(u_{n+d} - u_n) - g_{n-d/2}(u_n - u_{n-d})] / h^2
// on interior nodes, with face conductivities g the arithmetic mean of the two
// adjacent nodal values. Boundary nodes carry Dirichlet data.
class FluxOperator {
 public:
  explicit FluxOperator(const ScalarField& gamma);

  const GridSpec& grid() const { return grid_; }
  const ScalarField& gamma() const { return gamma_; }
  // Conductivity on the face between node n and n + e_axis.
  double face_gamma(std::size_t n, int axis) const { return face_[axis][n]; }

  // Applies L to all nodes of u; boundary entries of the result are 0.
  std::vector<double> apply(const std::vector<double>& u) const;

  // L u = g in the interior, u = boundary on the boundary. `guess` supplies the
  // starting interior values (boundary values are overwritten).
  std::pair<ScalarField, LinearSolveReport> solve(const ScalarField& g, const ScalarField& boundary,
                                                  const ScalarField* guess,
                                                  const SolverOptions& opts) const;

 private:
  LinearSolveReport pcg(std::vector<double>& x, const std::vector<double>& rhs,
                        const SolverOptions& opts) const;
  void apply_interior(const std::vector<double>& u, std::vector<double>& out) const;

  GridSpec grid_;
  ScalarField gamma_;
  std::array<std::vector<double>, 3> face_;
  std::vector<double> diag_;
};

// div(gamma grad u) = 0, u = f on the boundary.
std::pair<ScalarField, LinearSolveReport> solve_dirichlet_bv(const ScalarField& gamma,
                                                             const BoundaryTrace& f,
                                                             const SolverOptions& opts = {});

// div(gamma grad u) = g, u = 0 on the boundary.
std::pair<ScalarField, LinearSolveReport> solve_source(const ScalarField& gamma, const ScalarField& g,
                                                       const SolverOptions& opts = {});

}  // namespace nldtn

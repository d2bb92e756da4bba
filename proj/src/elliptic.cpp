#include "nldtn/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "nldtn/error.hpp"
#include "nldtn/material.hpp"

namespace nldtn {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double inner(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> real_part(const ScalarField& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = f[i].real();
  return v;
}

std::vector<double> imag_part(const ScalarField& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = f[i].imag();
  return v;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

FluxOperator::FluxOperator(const ScalarField& gamma) : grid_(gamma.grid()), gamma_(gamma) {
  if (grid_.kind() != DomainKind::UnitCube)
    throw Error(ErrorCode::InvalidDomain, "elliptic solves require a UnitCube grid");
  require_positive_gamma(gamma);
  const std::size_t N = grid_.num_nodes();
  const int M = grid_.cells();
  for (int d = 0; d < grid_.dim(); ++d) {
    face_[d].assign(N, 0.0);
    const std::size_t s = grid_.stride(d);
    for (std::size_t n = 0; n < N; ++n) {
      if (grid_.multi_index(n)[d] == M) continue;
      face_[d][n] = 0.5 * (gamma[n].real() + gamma[n + s].real());
    }
  }
  const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
  diag_.assign(N, 1.0);
  for (std::size_t n = 0; n < N; ++n) {
    if (grid_.on_boundary(n)) continue;
    double a = 0.0;
    for (int d = 0; d < grid_.dim(); ++d) a += face_[d][n] + face_[d][n - grid_.stride(d)];
    diag_[n] = a * inv_h2;
  }
}

std::vector<double> FluxOperator::apply(const std::vector<double>& u) const {
  const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
  std::vector<double> out(u.size(), 0.0);
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (grid_.on_boundary(n)) continue;
    double acc = 0.0;
    for (int d = 0; d < grid_.dim(); ++d) {
      const std::size_t s = grid_.stride(d);
      acc += face_[d][n] * (u[n + s] - u[n]) - face_[d][n - s] * (u[n] - u[n - s]);
    }
    out[n] = acc * inv_h2;
  }
  return out;
}

// out = -L u on interior nodes (SPD form); u must vanish on the boundary.
void FluxOperator::apply_interior(const std::vector<double>& u, std::vector<double>& out) const {
  const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (grid_.on_boundary(n)) {
      out[n] = 0.0;
      continue;
    }
    double acc = 0.0;
    for (int d = 0; d < grid_.dim(); ++d) {
      const std::size_t s = grid_.stride(d);
      acc += face_[d][n] * (u[n] - u[n + s]) + face_[d][n - s] * (u[n] - u[n - s]);
    }
    out[n] = acc * inv_h2;
  }
}

LinearSolveReport FluxOperator::pcg(std::vector<double>& x, const std::vector<double>& b,
                                    const SolverOptions& opts) const {
  const std::size_t N = x.size();
  const std::size_t interior = N - grid_.boundary_nodes().size();
  const int cap = opts.max_iter > 0
                      ? opts.max_iter
                      : static_cast<int>(std::ceil(20.0 * std::sqrt(static_cast<double>(interior)) * grid_.dim()));
  LinearSolveReport report;
  report.tolerance = opts.rel_tol;

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return report;
  }
  const double target = opts.rel_tol * bnorm;

  std::vector<double> r(N), z(N), p(N), q(N);
  double previous = std::numeric_limits<double>::infinity();
  // Restarted from the true residual so that tight tolerances are met rather
  // than only the recursively updated residual.
  for (int restart = 0; restart < 20; ++restart) {
    apply_interior(x, q);
    for (std::size_t n = 0; n < N; ++n) r[n] = b[n] - q[n];
    const double rnorm = norm2(r);
    report.final_residual = rnorm / bnorm;
    if (rnorm <= target) return report;
    if (rnorm > 0.5 * previous) break;  // stagnated at the rounding floor
    previous = rnorm;

    double rho_old = 0.0;
    for (int it = 0; report.iterations < cap; ++it) {
      for (std::size_t n = 0; n < N; ++n) z[n] = r[n] / diag_[n];
      const double rho = inner(r, z);
      if (it == 0)
        p = z;
      else
        for (std::size_t n = 0; n < N; ++n) p[n] = z[n] + (rho / rho_old) * p[n];
      rho_old = rho;
      apply_interior(p, q);
      const double alpha = rho / inner(p, q);
      for (std::size_t n = 0; n < N; ++n) {
        x[n] += alpha * p[n];
        r[n] -= alpha * q[n];
      }
      ++report.iterations;
      if (norm2(r) <= 0.5 * target) break;
    }
    if (report.iterations >= cap) break;
  }
  apply_interior(x, q);
  for (std::size_t n = 0; n < N; ++n) r[n] = b[n] - q[n];
  report.final_residual = norm2(r) / bnorm;
  if (report.final_residual > opts.rel_tol)
    throw Error(ErrorCode::NoConvergence,
                "PCG stopped at relative residual " + sci(report.final_residual) +
                    " after " + std::to_string(report.iterations) + " iterations");
  return report;
}

std::pair<ScalarField, LinearSolveReport> FluxOperator::solve(const ScalarField& g,
                                                              const ScalarField& boundary,
                                                              const ScalarField* guess,
                                                              const SolverOptions& opts) const {
  require_same_grid(grid_, g.grid());
  require_same_grid(grid_, boundary.grid());
  const std::size_t N = grid_.num_nodes();
  ScalarField u(grid_);
  LinearSolveReport total;
  total.tolerance = opts.rel_tol;

  for (int part = 0; part < 2; ++part) {
    std::vector<double> gb = part == 0 ? real_part(g) : imag_part(g);
    std::vector<double> fb = part == 0 ? real_part(boundary) : imag_part(boundary);
    for (std::size_t n = 0; n < N; ++n)
      if (!grid_.on_boundary(n)) fb[n] = 0.0;
    if (all_zero(gb) && all_zero(fb)) continue;

    // -L u_I = L(f) - g with u_I vanishing on the boundary.
    std::vector<double> rhs = apply(fb);
    for (std::size_t n = 0; n < N; ++n) rhs[n] = grid_.on_boundary(n) ? 0.0 : rhs[n] - gb[n];

    std::vector<double> x(N, 0.0);
    if (guess) {
      require_same_grid(grid_, guess->grid());
      for (std::size_t n = 0; n < N; ++n)
        if (!grid_.on_boundary(n)) x[n] = part == 0 ? (*guess)[n].real() : (*guess)[n].imag();
    }
    const LinearSolveReport rep = pcg(x, rhs, opts);
    total.iterations += rep.iterations;
    total.final_residual = std::max(total.final_residual, rep.final_residual);
    for (std::size_t n = 0; n < N; ++n) {
      const double v = grid_.on_boundary(n) ? fb[n] : x[n];
      if (part == 0)
        u[n].real(v);
      else
        u[n].imag(v);
    }
  }
  return {std::move(u), total};
}

std::pair<ScalarField, LinearSolveReport> solve_dirichlet_bv(const ScalarField& gamma,
                                                             const BoundaryTrace& f,
                                                             const SolverOptions& opts) {
  require_same_grid(gamma.grid(), f.grid());
  const FluxOperator op(gamma);
  return op.solve(ScalarField(gamma.grid()), f.to_nodal(), nullptr, opts);
}

std::pair<ScalarField, LinearSolveReport> solve_source(const ScalarField& gamma, const ScalarField& g,
                                                       const SolverOptions& opts) {
  require_same_grid(gamma.grid(), g.grid());
  const FluxOperator op(gamma);
  ScalarField interior_g = g;
  for (std::size_t n : gamma.grid().boundary_nodes()) interior_g[n] = 0.0;
  return op.solve(interior_g, ScalarField(gamma.grid()), nullptr, opts);
}

}  // namespace nldtn

#include "nldtn/forward.hpp"

#include <cmath>
#include <cstdio>

#include "nldtn/error.hpp"

namespace nldtn {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

VectorField nonlinear_flux(const MaterialLaw& law, const ScalarField& u) {
  return eval_q(law, gradient(u));
}

std::pair<ScalarField, ContractionReport> solve_nonlinear(const MaterialLaw& law, const BoundaryTrace& f,
                                                          const ForwardOptions& opts) {
  require_same_grid(law.gamma.grid(), f.grid());
  const GridSpec& grid = f.grid();
  const FluxOperator op(law.gamma);

  auto [u0, rep0] = op.solve(ScalarField(grid), f.to_nodal(), nullptr, opts.linear);
  ContractionReport report;
  report.linear_iterations = rep0.iterations;
  if (law.is_linear()) return {std::move(u0), report};

  const ScalarField zero(grid);
  ScalarField u = u0;
  int growing = 0;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    // Defect form of the Picard step: L delta = -div Q(grad u) - L u, so the
    // linear tolerance is relative to the size of the correction.
    const ScalarField divq = divergence(nonlinear_flux(law, u));
    std::vector<double> re(u.size()), im(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) {
      re[n] = u[n].real();
      im[n] = u[n].imag();
    }
    const std::vector<double> lre = op.apply(re), lim = op.apply(im);
    ScalarField defect(grid);
    for (std::size_t n = 0; n < u.size(); ++n) {
      if (grid.on_boundary(n)) continue;
      defect[n] = -divq[n] - Complex(lre[n], lim[n]);
    }
    auto [delta, rep] = op.solve(defect, zero, nullptr, opts.linear);
    report.linear_iterations += rep.iterations;
    u += delta;

    const double norm = delta.max_abs();
    report.picard_iterations = it + 1;
    report.final_update_norm = norm;
    report.update_norms.push_back(norm);
    if (!std::isfinite(norm)) {
      report.diverged = true;
      throw Error(ErrorCode::NonContraction, "Picard iterate became non-finite");
    }
    if (norm < opts.tol) return {std::move(u), report};
    growing = norm > previous ? growing + 1 : 0;
    previous = norm;
    if (growing >= 3) {
      report.diverged = true;
      throw Error(ErrorCode::NonContraction,
                  "Picard updates grew for 3 consecutive iterations (last " + sci(norm) + ")");
    }
  }
  report.diverged = true;
  throw Error(ErrorCode::NonContraction,
              "Picard iteration hit max_iter with update norm " + sci(report.final_update_norm));
}

std::pair<ScalarField, ContractionReport> solve_nonlinear(const MaterialLaw& law, const BoundaryTrace& f,
                                                          double tol, int max_iter) {
  ForwardOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return solve_nonlinear(law, f, opts);
}

BoundaryTrace boundary_flux(const FluxOperator& op, const ScalarField& u, const VectorField* W,
                            FluxExtraction extraction) {
  const GridSpec& grid = op.grid();
  require_same_grid(grid, u.grid());
  if (W) require_same_grid(grid, W->grid());
  const int M = grid.cells();
  const double inv_h = 1.0 / grid.spacing();
  BoundaryTrace out(grid);

  if (extraction == FluxExtraction::Pointwise) {
    const VectorField g = gradient(u);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const BoundarySample& s = out.sample(i);
      const std::size_t b = s.node;
      const double gamma_b = op.gamma()[b].real();
      Complex flux = gamma_b * g[b][s.axis];
      if (W) flux += (*W)[b][s.axis];
      out[i] = static_cast<double>(s.side) * flux;
    }
    return out;
  }

  // Flux on the link n -> n + e_axis.
  const auto link = [&](std::size_t n, int axis) {
    const std::size_t st = grid.stride(axis);
    Complex F = op.face_gamma(n, axis) * (u[n + st] - u[n]) * inv_h;
    if (W) F += 0.5 * ((*W)[n][axis] + (*W)[n + st][axis]);
    return F;
  };

  for (std::size_t i = 0; i < out.size(); ++i) {
    const BoundarySample& s = out.sample(i);
    const std::size_t b = s.node;
    const auto idx = grid.multi_index(b);
    const std::size_t st = grid.stride(s.axis);
    Complex lambda = static_cast<double>(s.side) * (s.side > 0 ? link(b - st, s.axis) : link(b, s.axis));

    int boundary_axes = 0;
    Complex tangential = 0.0;
    for (int e = 0; e < grid.dim(); ++e) {
      if (idx[e] == 0 || idx[e] == M) {
        ++boundary_axes;
        continue;
      }
      const std::size_t se = grid.stride(e);
      tangential += link(b, e) - link(b - se, e);
    }
    // Area ratio between a tangential half-cell face and the boundary face is 1/2.
    lambda -= 0.5 * tangential / static_cast<double>(boundary_axes);
    out[i] = lambda;
  }
  return out;
}

BoundaryTrace dn_linear(const ScalarField& gamma, const BoundaryTrace& f, const ForwardOptions& opts) {
  require_same_grid(gamma.grid(), f.grid());
  const FluxOperator op(gamma);
  auto [u, rep] = op.solve(ScalarField(gamma.grid()), f.to_nodal(), nullptr, opts.linear);
  return boundary_flux(op, u, nullptr, opts.extraction);
}

BoundaryTrace dn_nonlinear(const MaterialLaw& law, const BoundaryTrace& f, const ForwardOptions& opts) {
  auto [u, rep] = solve_nonlinear(law, f, opts);
  const FluxOperator op(law.gamma);
  const VectorField W = nonlinear_flux(law, u);
  return boundary_flux(op, u, &W, opts.extraction);
}

}  // namespace nldtn

#include "nldtn/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "nldtn/error.hpp"
#include "nldtn/extrapolation.hpp"

namespace nldtn {

namespace {

std::pair<FluxOperator, ScalarField> linear_solution(const ScalarField& gamma, const BoundaryTrace& f,
                                                     const SolverOptions& opts) {
  FluxOperator op(gamma);
  auto [u, rep] = op.solve(ScalarField(gamma.grid()), f.to_nodal(), nullptr, opts);
  return {std::move(op), std::move(u)};
}

}  // namespace

ScalarField solve_u2(const ScalarField& gamma, const QuadCoeffs& quad, const ScalarField& u1,
                     const SolverOptions& opts) {
  require_same_grid(gamma.grid(), u1.grid());
  if (quad.is_zero()) return ScalarField(gamma.grid());
  ScalarField rhs = divergence(eval_p(quad, gradient(u1)));
  rhs *= -1.0;
  return solve_source(gamma, rhs, opts).first;
}

BoundaryTrace second_order_reference(const ScalarField& gamma, const QuadCoeffs& quad, const BoundaryTrace& f,
                                     const ForwardOptions& opts) {
  auto [op, u1] = linear_solution(gamma, f, opts.linear);
  const ScalarField u2 = solve_u2(gamma, quad, u1, opts.linear);
  const VectorField W = eval_p(quad, gradient(u1));
  return boundary_flux(op, u2, &W, opts.extraction);
}

std::vector<double> default_t_sweep() {
  std::vector<double> t;
  for (int m = 3; m <= 7; ++m) t.push_back(std::ldexp(1.0, -m));
  return t;
}

ExpansionResult second_order_from_data(const MaterialLaw& law, const BoundaryTrace& f,
                                       const std::vector<double>& t_list, const ForwardOptions& opts) {
  if (t_list.size() < 2) throw Error(ErrorCode::InvalidParam, "need at least two t values");
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    if (!(t_list[i] > 0.0)) throw Error(ErrorCode::InvalidParam, "t values must be positive");
    if (i > 0 && !(t_list[i] < t_list[i - 1]))
      throw Error(ErrorCode::InvalidParam, "t values must be strictly decreasing");
  }

  ExpansionResult res{.extrapolated = BoundaryTrace(f.grid()), .reference = BoundaryTrace(f.grid())};
  const BoundaryTrace lin = dn_linear(law.gamma, f, opts);
  res.reference = second_order_reference(law.gamma, law.quad, f, opts);

  for (double t : t_list) {
    BoundaryTrace lc(f.grid());
    try {
      lc = dn_nonlinear(law, t * f, opts);
    } catch (const Error& e) {
      // Only a failure above every successful t is a truncation of the sweep.
      if (e.code() != ErrorCode::NonContraction || !res.t_values.empty()) throw;
      res.failed_t.push_back(t);
      continue;
    }
    BoundaryTrace first = lc - t * lin;
    first *= 1.0 / t;
    BoundaryTrace D = first;
    D *= 1.0 / t;
    res.first_order.push_back(first.max_abs());
    res.deviations.push_back((D - res.reference).max_abs());
    res.t_values.push_back(t);
    res.traces.push_back(std::move(D));
  }
  const std::size_t n = res.t_values.size();
  if (n < 2) throw Error(ErrorCode::NonContraction, "fewer than two t values contracted");
  res.extrapolated = richardson(res.t_values[n - 2], res.traces[n - 2], res.t_values[n - 1], res.traces[n - 1]);
  res.fitted_order = fitted_slope(res.t_values, res.deviations);
  return res;
}

double discrete_h1_norm(const ScalarField& w) {
  const VectorField g = gradient(w);
  ScalarField dens(w.grid());
  for (std::size_t n = 0; n < w.size(); ++n) {
    double s = std::norm(w[n]);
    for (int d = 0; d < w.grid().dim(); ++d) s += std::norm(g[n][d]);
    dens[n] = s;
  }
  return std::sqrt(integrate_volume(dens).real());
}

double expansion_remainder(const MaterialLaw& law, const BoundaryTrace& f, double t, const ForwardOptions& opts) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidParam, "t must be positive");
  auto [u, rep] = solve_nonlinear(law, t * f, opts);
  auto [op, u1] = linear_solution(law.gamma, f, opts.linear);
  const ScalarField u2 = solve_u2(law.gamma, law.quad, u1, opts.linear);
  ScalarField v = u;
  v *= 1.0 / t;
  v -= u1;
  v *= 1.0 / t;
  return discrete_h1_norm(v - u2);
}

Complex volume_form(const QuadCoeffs& quad, const ScalarField& u1, const ScalarField& v) {
  require_same_grid(u1.grid(), v.grid());
  const VectorField p = eval_p(quad, gradient(u1));
  const VectorField gv = gradient(v);
  ScalarField dens(v.grid());
  for (std::size_t n = 0; n < v.size(); ++n) dens[n] = dot(p[n], gv[n], v.grid().dim());
  return integrate_volume(dens);
}

Complex trilinear_form(const QuadCoeffs& quad, const VectorField& g1, const VectorField& g2, const VectorField& gv) {
  require_same_grid(g1.grid(), g2.grid());
  require_same_grid(g1.grid(), gv.grid());
  ScalarField dens(g1.grid());
  for (std::size_t n = 0; n < dens.size(); ++n)
    dens[n] = dot(polarized_p(quad, n, g1[n], g2[n]), gv[n], g1.grid().dim());
  return integrate_volume(dens);
}

Complex trilinear_form(const QuadCoeffs& quad, const ScalarField& u1, const ScalarField& u2, const ScalarField& v) {
  require_same_grid(u1.grid(), u2.grid());
  require_same_grid(u1.grid(), v.grid());
  return trilinear_form(quad, gradient(u1), gradient(u2), gradient(v));
}

IdentityGap divergence_identity_gap(const MaterialLaw& law, const BoundaryTrace& f, const BoundaryTrace& g,
                                    const std::vector<double>& t_list, const ForwardOptions& opts) {
  require_same_grid(f.grid(), g.grid());
  IdentityGap out{.expansion = second_order_from_data(law, f, t_list, opts)};
  out.boundary = integrate_boundary(out.expansion.extrapolated, g);
  const ScalarField u1 = linear_solution(law.gamma, f, opts.linear).second;
  const ScalarField v = linear_solution(law.gamma, g, opts.linear).second;
  out.volume = volume_form(law.quad, u1, v);
  out.gap = std::abs(out.boundary - out.volume);
  return out;
}

}  // namespace nldtn

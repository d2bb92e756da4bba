#include "nldtn/singular.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "nldtn/error.hpp"
#include "nldtn/extrapolation.hpp"
#include "nldtn/forward.hpp"

namespace nldtn {

namespace {

constexpr double kPi = std::numbers::pi;

Real3 unit(int axis) {
  Real3 e{};
  e[axis] = 1.0;
  return e;
}

// Composite Gauss-Legendre rule on [0,1] with equal panels.
QuadratureRule composite_gl(int panels, int nodes) {
  const QuadratureRule base = gauss_legendre(nodes);
  QuadratureRule out;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < nodes; ++i) {
      out.nodes.push_back((p + base.nodes[i]) / panels);
      out.weights.push_back(base.weights[i] / panels);
    }
  return out;
}

// Generic half-space integral of g(w) / |w|^6 over eta3 > 0, using
//   eta3 = tan(theta), rho = (eta3 + 1) tan(psi),
// which maps the half-space onto a bounded box with a smooth integrand.
template <class F>
double half_space_integral(const ProbeFrame& fr, const HalfSpaceRule& rule, F&& g) {
  const QuadratureRule th = gauss_legendre(rule.n_theta);
  const QuadratureRule ps = gauss_legendre(rule.n_psi);
  const double half_pi = 0.5 * kPi;
  const double dphi = 2.0 * kPi / rule.n_phi;
  double acc = 0.0;
  for (int a = 0; a < rule.n_theta; ++a) {
    const double theta = half_pi * th.nodes[a];
    const double z = 1.0 + std::tan(theta);
    const double jt = half_pi * th.weights[a] / (std::cos(theta) * std::cos(theta));
    for (int b = 0; b < rule.n_psi; ++b) {
      const double psi = half_pi * ps.nodes[b];
      const double rho = z * std::tan(psi);
      const double jp = half_pi * ps.weights[b] * z / (std::cos(psi) * std::cos(psi));
      const double r2 = rho * rho + z * z;
      const double inv6 = 1.0 / (r2 * r2 * r2);
      for (int c = 0; c < rule.n_phi; ++c) {
        const double phi = c * dphi;
        const double e1 = rho * std::cos(phi), e2 = rho * std::sin(phi);
        Real3 w;
        for (int d = 0; d < 3; ++d) w[d] = e1 * fr.T1[d] + e2 * fr.T2[d] - z * fr.N[d];
        acc += g(w, e1, z) * inv6 * rho * jp * jt * dphi;
      }
    }
  }
  return acc;
}

void check_axis(int k) {
  if (k < 0 || k > 2) throw Error(ErrorCode::BadIndices, "axis index out of range");
}

}  // namespace

ProbeFrame probe_frame(int s, int t, double alpha, double beta) {
  check_axis(s);
  check_axis(t);
  if (s > t) throw Error(ErrorCode::BadIndices, "frame needs s <= t");
  ProbeFrame f;
  f.s = s;
  f.t = t;
  if (s == t) {
    f.alpha = 1.0;
    f.beta = 0.0;
    f.N = unit(s);
    int rest[2], n = 0;
    for (int d = 0; d < 3; ++d)
      if (d != s) rest[n++] = d;
    f.T1 = unit(rest[0]);
    f.T2 = unit(rest[1]);
    return f;
  }
  if (!(alpha > 0.0) || !(beta > 0.0) || std::abs(alpha * alpha + beta * beta - 1.0) > 1e-12)
    throw Error(ErrorCode::NotNormalized, "need alpha, beta > 0 with alpha^2 + beta^2 = 1");
  f.alpha = alpha;
  f.beta = beta;
  const int k = 3 - s - t;
  for (int d = 0; d < 3; ++d) {
    f.N[d] = alpha * (d == s) + beta * (d == t);
    f.T2[d] = beta * (d == s) - alpha * (d == t);
  }
  f.T1 = unit(k);
  return f;
}

std::vector<ProbeFrame> standard_frames() {
  const double a = std::sqrt(0.5);
  return {probe_frame(0, 0), probe_frame(1, 1), probe_frame(2, 2),
          probe_frame(0, 1, a, a), probe_frame(0, 2, a, a), probe_frame(1, 2, a, a)};
}

double half_space_moment(const ProbeFrame& frame, int k, int l, const HalfSpaceRule& rule) {
  check_axis(k);
  check_axis(l);
  return half_space_integral(frame, rule, [&](const Real3& w, double, double) { return w[k] * w[l]; });
}

double half_space_base_a(const HalfSpaceRule& rule) {
  return half_space_integral(probe_frame(2, 2), rule, [](const Real3&, double e1, double) { return e1 * e1; });
}

double half_space_base_b(const HalfSpaceRule& rule) {
  return half_space_integral(probe_frame(2, 2), rule, [](const Real3&, double, double z) { return z * z; });
}

double closed_form_moment(const ProbeFrame& frame, int k, int l) {
  check_axis(k);
  check_axis(l);
  const double A = kPi / 4.0, B = kPi / 2.0;
  return A * (frame.T1[k] * frame.T1[l] + frame.T2[k] * frame.T2[l]) + B * frame.N[k] * frame.N[l];
}

MomentTable build_moment_table(const std::vector<ProbeFrame>& frames, const HalfSpaceRule& rule) {
  MomentTable t;
  for (const ProbeFrame& f : frames)
    for (int k = 0; k < 3; ++k)
      for (int l = k; l < 3; ++l) {
        MomentRow r{f, k, l, half_space_moment(f, k, l, rule), closed_form_moment(f, k, l)};
        const double err = std::abs(r.quadrature - r.closed_form);
        r.rel_err = r.closed_form != 0.0 ? err / std::abs(r.closed_form) : err;
        t.rows.push_back(r);
      }
  return t;
}

std::string MomentTable::to_csv() const {
  std::ostringstream os;
  os << "frame_s,frame_t,alpha,beta,k,l,quadrature,closed_form,rel_err\n";
  char buf[256];
  for (const MomentRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.12f,%.12f,%d,%d,%.12e,%.12e,%.3e\n", r.frame.s + 1, r.frame.t + 1,
                  r.frame.alpha, r.frame.beta, r.k + 1, r.l + 1, r.quadrature, r.closed_form, r.rel_err);
    os << buf;
  }
  return os.str();
}

namespace {

// eps int_B y_k y_l / |y|^6 dy, y = x - eps N, for one rule size.
//
// Along a ray y = r omega from the pole with mu = -omega . N, the ball is
// entered and left at r = d mu -/+ sqrt(d^2 mu^2 - (d^2 - 1)), d = 1 + eps,
// and the radial integral of r^-2 is 2 sqrt(d^2 mu^2 - (d^2 - 1)) / (d^2 - 1).
// The remaining sphere integral runs over mu >= mu_min with a square-root
// endpoint, removed by mu = mu_min + (1 - mu_min) sigma^2.
std::array<double, 6> probe_moments(const ProbeFrame& fr, double eps, int panels, int nodes, int n_phi) {
  const double d = 1.0 + eps;
  const double c = d * d - 1.0;
  const double mu_min = std::sqrt(c) / d;
  const QuadratureRule sig = composite_gl(panels, nodes);
  const double dphi = 2.0 * kPi / n_phi;
  std::array<double, 6> acc{};
  for (std::size_t a = 0; a < sig.nodes.size(); ++a) {
    const double sg = sig.nodes[a];
    const double mu = mu_min + (1.0 - mu_min) * sg * sg;
    const double dmu = 2.0 * (1.0 - mu_min) * sg * sig.weights[a];
    const double radial = eps * 2.0 * std::sqrt(std::max(0.0, d * d * mu * mu - c)) / c;
    const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    for (int b = 0; b < n_phi; ++b) {
      const double phi = b * dphi;
      Real3 om;
      for (int e = 0; e < 3; ++e)
        om[e] = -mu * fr.N[e] + st * (std::cos(phi) * fr.T1[e] + std::sin(phi) * fr.T2[e]);
      const double w = radial * dmu * dphi;
      int p = 0;
      for (int k = 0; k < 3; ++k)
        for (int l = k; l < 3; ++l) acc[p++] += w * om[k] * om[l];
    }
  }
  return acc;
}

std::array<double, 6> checked_probe_moments(const ProbeFrame& fr, double eps, const ProbeRule& rule) {
  if (!(eps > 0.0) || eps > 0.2) throw Error(ErrorCode::InvalidParam, "eps must lie in (0, 0.2]");
  const auto full = probe_moments(fr, eps, rule.panels, rule.nodes_per_panel, rule.n_phi);
  const auto half = probe_moments(fr, eps, std::max(1, rule.panels / 2), rule.nodes_per_panel, rule.n_phi);
  double scale = 0.0, diff = 0.0;
  for (int p = 0; p < 6; ++p) {
    scale = std::max(scale, std::abs(full[p]));
    diff = std::max(diff, std::abs(full[p] - half[p]));
  }
  if (diff > rule.target * scale)
    throw Error(ErrorCode::QuadratureBudget, "probe quadrature did not reach the requested accuracy");
  return full;
}

}  // namespace

double scaled_probe_moment(const ProbeFrame& frame, int k, int l, double eps, const ProbeRule& rule) {
  check_axis(k);
  check_axis(l);
  return checked_probe_moments(frame, eps, rule)[QuadCoeffs::pair_index(3, k, l)];
}

double scaled_probe_integral(const QuadCoeffs& quad, const ProbeFrame& frame, int j, double eps,
                             const ProbeRule& rule) {
  if (quad.dim() != 3 || !quad.is_constant())
    throw Error(ErrorCode::InvalidParam, "singular probes need constant 3-D coefficients");
  check_axis(j);
  const auto m = checked_probe_moments(frame, eps, rule);
  double acc = 0.0;
  for (int p = 0; p < 6; ++p) {
    const auto [k, l] = QuadCoeffs::pair_at(3, p);
    acc += quad.at(j, k, l) * m[p];
  }
  return acc;
}

EpsLimit eps_limit(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() < 2 || eps.size() != values.size())
    throw Error(ErrorCode::InvalidParam, "eps_limit needs at least two matching samples");
  for (std::size_t i = 1; i < eps.size(); ++i)
    if (std::abs(eps[i] - 0.5 * eps[i - 1]) > 1e-12 * eps[i - 1])
      throw Error(ErrorCode::InvalidParam, "eps values must halve");
  const std::size_t n = values.size();
  EpsLimit out;
  if (n >= 3) {
    const double d1 = values[n - 2] - values[n - 3];
    const double d2 = values[n - 1] - values[n - 2];
    if (d1 == 0.0 && d2 == 0.0) {
      out.value = values[n - 1];
      return out;
    }
    const double ratio = d1 / d2;
    if (!(ratio > 1.0) || !std::isfinite(ratio))
      throw Error(ErrorCode::NonMonotone, "eps sweep does not converge monotonically");
    out.order = std::log2(ratio);
  } else if (values[0] == values[1]) {
    out.value = values[1];
    return out;
  }
  out.value = richardson(eps[n - 2], values[n - 2], eps[n - 1], values[n - 1], out.order);
  return out;
}

Recovery assemble_and_recover(const std::map<std::pair<int, int>, double>& measurements,
                              const std::vector<ProbeFrame>& frames, double max_condition) {
  const int nf = static_cast<int>(frames.size());
  if (nf < 6) throw Error(ErrorCode::MissingProbe, "need at least six frames");
  Eigen::MatrixXd A(nf, 6);
  for (int f = 0; f < nf; ++f)
    for (int p = 0; p < 6; ++p) {
      const auto [k, l] = QuadCoeffs::pair_at(3, p);
      A(f, p) = closed_form_moment(frames[f], k, l);
    }
  Recovery rec;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  rec.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (rec.condition > max_condition)
    throw Error(ErrorCode::IllConditioned, "moment matrix condition number exceeds the limit");
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd b(nf);
    for (int f = 0; f < nf; ++f) {
      const auto it = measurements.find({f, j});
      if (it == measurements.end())
        throw Error(ErrorCode::MissingProbe,
                    "missing measurement for frame " + std::to_string(f) + ", component " + std::to_string(j));
      b(f) = it->second;
    }
    const Eigen::VectorXd c = qr.solve(b);
    for (int p = 0; p < 6; ++p) {
      const auto [k, l] = QuadCoeffs::pair_at(3, p);
      rec.coeffs.set(j, k, l, c(p));
    }
  }
  return rec;
}

std::map<std::pair<int, int>, double> closed_form_measurements(const QuadCoeffs& quad,
                                                               const std::vector<ProbeFrame>& frames) {
  std::map<std::pair<int, int>, double> out;
  for (int f = 0; f < static_cast<int>(frames.size()); ++f)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int p = 0; p < 6; ++p) {
        const auto [k, l] = QuadCoeffs::pair_at(3, p);
        acc += quad.at(j, k, l) * closed_form_moment(frames[f], k, l);
      }
      out[{f, j}] = acc;
    }
  return out;
}

QuadCoeffs affine_probe_recover(const MaterialLaw& law, double tau) {
  const GridSpec& grid = law.gamma.grid();
  if (grid.dim() != 3 || grid.kind() != DomainKind::UnitCube)
    throw Error(ErrorCode::InvalidDim, "affine probing runs on a 3-D cube");
  if (!law.quad.is_constant() || law.residual.kind != ResidualSpec::Kind::Zero)
    throw Error(ErrorCode::InvalidParam, "affine probing needs constant coefficients and R = 0");
  const double g0 = law.gamma[0].real();
  for (std::size_t n = 0; n < law.gamma.size(); ++n)
    if (law.gamma[n].real() != g0) throw Error(ErrorCode::InvalidParam, "affine probing needs constant gamma");

  // P_i(q) from the face x_i = 1 (face-interior samples).
  const auto response = [&](const Real3& q) {
    const BoundaryTrace f = BoundaryTrace::from_function(
        grid, [&](const Point& x) { return Complex(tau * (q[0] * x[0] + q[1] * x[1] + q[2] * x[2])); });
    const BoundaryTrace lam = dn_nonlinear(law, f);
    Real3 p{};
    std::array<int, 3> count{};
    for (std::size_t s = 0; s < lam.size(); ++s) {
      const BoundarySample& bs = lam.sample(s);
      if (bs.side < 0) continue;
      const auto idx = grid.multi_index(bs.node);
      bool face_interior = true;
      for (int d = 0; d < 3; ++d)
        if (d != bs.axis && (idx[d] == 0 || idx[d] == grid.cells())) face_interior = false;
      if (!face_interior) continue;
      p[bs.axis] += (lam[s].real() - g0 * tau * q[bs.axis]) / (tau * tau);
      ++count[bs.axis];
    }
    for (int d = 0; d < 3; ++d) p[d] /= count[d];
    return p;
  };

  std::array<Real3, 3> diag;
  for (int k = 0; k < 3; ++k) diag[k] = response(unit(k));
  QuadCoeffs c(3);
  for (int k = 0; k < 3; ++k)
    for (int l = k; l < 3; ++l) {
      if (k == l) {
        for (int i = 0; i < 3; ++i) c.set(i, k, k, diag[k][i]);
        continue;
      }
      Real3 q{};
      q[k] = q[l] = 1.0;
      const Real3 p = response(q);
      for (int i = 0; i < 3; ++i) c.set(i, k, l, p[i] - diag[k][i] - diag[l][i]);
    }
  return c;
}

}  // namespace nldtn

#include "nldtn/material.hpp"

#include <cmath>

#include "nldtn/error.hpp"

namespace nldtn {

QuadCoeffs::QuadCoeffs(int dim) : dim_(dim) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidDim, "coefficient dimension must be 2 or 3");
  slots_.resize(static_cast<std::size_t>(dim * num_pairs(dim)));
}

int QuadCoeffs::pair_index(int dim, int k, int l) {
  if (k > l) std::swap(k, l);
  if (k < 0 || l >= dim) throw Error(ErrorCode::BadIndices, "coefficient index out of range");
  // Row k of the upper triangle starts after sum_{r<k} (dim - r) entries.
  return k * dim - k * (k - 1) / 2 + (l - k);
}

std::pair<int, int> QuadCoeffs::pair_at(int dim, int p) {
  for (int k = 0; k < dim; ++k)
    for (int l = k; l < dim; ++l)
      if (pair_index(dim, k, l) == p) return {k, l};
  throw Error(ErrorCode::BadIndices, "pair index out of range");
}

QuadCoeffs::Slot& QuadCoeffs::slot(int i, int k, int l) {
  if (i < 0 || i >= dim_) throw Error(ErrorCode::BadIndices, "component index out of range");
  return slots_[static_cast<std::size_t>(i * num_pairs(dim_) + pair_index(dim_, k, l))];
}

const QuadCoeffs::Slot& QuadCoeffs::slot(int i, int k, int l) const {
  if (i < 0 || i >= dim_) throw Error(ErrorCode::BadIndices, "component index out of range");
  return slots_[static_cast<std::size_t>(i * num_pairs(dim_) + pair_index(dim_, k, l))];
}

void QuadCoeffs::set(int i, int k, int l, double value) {
  Slot& s = slot(i, k, l);
  s.constant = value;
  s.nodal.clear();
}

void QuadCoeffs::set_field(int i, int k, int l, const ScalarField& field) {
  if (field_grid_)
    require_same_grid(*field_grid_, field.grid());
  else
    field_grid_ = field.grid();
  if (field.max_abs_imag() != 0.0)
    throw Error(ErrorCode::InvalidParam, "quadratic coefficients must be real");
  Slot& s = slot(i, k, l);
  s.nodal.resize(field.size());
  for (std::size_t n = 0; n < field.size(); ++n) s.nodal[n] = field[n].real();
}

double QuadCoeffs::at(int i, int k, int l, std::size_t node) const {
  const Slot& s = slot(i, k, l);
  return s.nodal.empty() ? s.constant : s.nodal[node];
}

bool QuadCoeffs::is_field(int i, int k, int l) const { return !slot(i, k, l).nodal.empty(); }

bool QuadCoeffs::is_constant() const {
  for (const auto& s : slots_)
    if (!s.nodal.empty()) return false;
  return true;
}

bool QuadCoeffs::is_zero() const {
  for (const auto& s : slots_) {
    if (s.nodal.empty()) {
      if (s.constant != 0.0) return false;
    } else {
      for (double v : s.nodal)
        if (v != 0.0) return false;
    }
  }
  return true;
}

QuadCoeffs QuadCoeffs::operator+(const QuadCoeffs& other) const {
  if (dim_ != other.dim_) throw Error(ErrorCode::InvalidDim, "coefficient dimensions differ");
  if (field_grid_ && other.field_grid_) require_same_grid(*field_grid_, *other.field_grid_);
  QuadCoeffs sum(dim_);
  sum.field_grid_ = field_grid_ ? field_grid_ : other.field_grid_;
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    const Slot& a = slots_[s];
    const Slot& b = other.slots_[s];
    Slot& c = sum.slots_[s];
    if (a.nodal.empty() && b.nodal.empty()) {
      c.constant = a.constant + b.constant;
      continue;
    }
    const std::size_t n = a.nodal.empty() ? b.nodal.size() : a.nodal.size();
    c.nodal.resize(n);
    for (std::size_t j = 0; j < n; ++j)
      c.nodal[j] = (a.nodal.empty() ? a.constant : a.nodal[j]) +
                   (b.nodal.empty() ? b.constant : b.nodal[j]);
  }
  return sum;
}

double smoothstep_cutoff(double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  const double s = 2.0 * r - 1.0;
  const double s3 = s * s * s;
  return 1.0 - s3 * (10.0 - 15.0 * s + 6.0 * s * s);
}

Vec ResidualSpec::eval(const Vec& q, int dim) const {
  Vec out{};
  if (kind == Kind::Zero) return out;
  double norm2 = 0.0;
  for (int d = 0; d < dim; ++d) norm2 += std::norm(q[d]);
  const double chi = smoothstep_cutoff(std::sqrt(norm2) / h_cut);
  const double factor = (c2 * chi + (1.0 - chi)) * norm2;
  for (int d = 0; d < dim; ++d) out[d] = factor * q[d];
  return out;
}

ResidualSpec make_cutoff_residual(double c2, double h_cut) {
  if (!(c2 >= 0.0) || !(h_cut > 0.0) || !std::isfinite(c2) || !std::isfinite(h_cut))
    throw Error(ErrorCode::InvalidParam, "cutoff residual needs C2 >= 0 and h_cut > 0");
  return ResidualSpec{ResidualSpec::Kind::CubicCutoff, c2, h_cut};
}

void require_positive_gamma(const ScalarField& gamma) {
  if (gamma.max_abs_imag() != 0.0) throw Error(ErrorCode::NotPositive, "gamma must be real");
  const double m = gamma.min_real();
  if (!(m > 0.0)) throw Error(ErrorCode::NotPositive, "gamma must be bounded below by a positive constant");
}

MaterialLaw make_law(ScalarField gamma, QuadCoeffs quad, ResidualSpec residual) {
  require_positive_gamma(gamma);
  if (gamma.grid().dim() != quad.dim())
    throw Error(ErrorCode::InvalidDim, "gamma and coefficients have different dimensions");
  if (quad.field_grid()) require_same_grid(gamma.grid(), *quad.field_grid());
  return MaterialLaw{std::move(gamma), std::move(quad), residual};
}

Vec eval_p(const QuadCoeffs& quad, std::size_t node, const Vec& q) {
  const int n = quad.dim();
  Vec out{};
  for (int i = 0; i < n; ++i) {
    Complex acc = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l) acc += quad.at(i, k, l, node) * q[k] * q[l];
    out[i] = acc;
  }
  return out;
}

Vec polarized_p(const QuadCoeffs& quad, std::size_t node, const Vec& q1, const Vec& q2) {
  const int n = quad.dim();
  Vec out{};
  for (int i = 0; i < n; ++i) {
    Complex acc = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l)
        acc += quad.at(i, k, l, node) * (q1[k] * q2[l] + q1[l] * q2[k]);
    out[i] = acc;
  }
  return out;
}

Vec eval_q(const MaterialLaw& law, std::size_t node, const Vec& q) {
  Vec p = eval_p(law.quad, node, q);
  const Vec r = law.residual.eval(q, law.dim());
  for (int d = 0; d < law.dim(); ++d) p[d] += r[d];
  return p;
}

Vec eval_c(const MaterialLaw& law, std::size_t node, const Vec& q) {
  Vec c = eval_q(law, node, q);
  const double g = law.gamma[node].real();
  for (int d = 0; d < law.dim(); ++d) c[d] += g * q[d];
  return c;
}

VectorField eval_p(const QuadCoeffs& quad, const VectorField& q) {
  VectorField out(q.grid());
  for (std::size_t n = 0; n < q.size(); ++n) out[n] = eval_p(quad, n, q[n]);
  return out;
}

VectorField eval_q(const MaterialLaw& law, const VectorField& q) {
  VectorField out(q.grid());
  for (std::size_t n = 0; n < q.size(); ++n) out[n] = eval_q(law, n, q[n]);
  return out;
}

Complex dot(const Vec& a, const Vec& b, int dim) {
  Complex acc = 0.0;
  for (int d = 0; d < dim; ++d) acc += a[d] * b[d];
  return acc;
}

}  // namespace nldtn

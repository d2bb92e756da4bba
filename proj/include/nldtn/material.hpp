#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nldtn/grid.hpp"

namespace nldtn {

// Coefficients c^i_{kl} of the quadratic nonlinearity
//   P_i(x, q) = sum_{k <= l} c^i_{kl}(x) q_k q_l.
// One slot per unordered pair (k, l); writing or reading (l, k) addresses the
// same slot. Each slot is either a constant or a real nodal field.
class QuadCoeffs {
 public:
  explicit QuadCoeffs(int dim);

  int dim() const { return dim_; }
  static int num_pairs(int dim) { return dim * (dim + 1) / 2; }
  // Index of the unordered pair {k, l} in canonical (k <= l) order:
  // (0,0), (0,1), ..., (0,n-1), (1,1), ...
  static int pair_index(int dim, int k, int l);
  static std::pair<int, int> pair_at(int dim, int p);

  void set(int i, int k, int l, double value);
  void set_field(int i, int k, int l, const ScalarField& field);

  double at(int i, int k, int l, std::size_t node = 0) const;
  bool is_field(int i, int k, int l) const;

  bool is_constant() const;
  bool is_zero() const;
  // Grid of the nodal slots, if any.
  const std::optional<GridSpec>& field_grid() const { return field_grid_; }

  QuadCoeffs operator+(const QuadCoeffs& other) const;

 private:
  struct Slot {
    double constant = 0.0;
    std::vector<double> nodal;  // empty for constants
  };
  Slot& slot(int i, int k, int l);
  const Slot& slot(int i, int k, int l) const;

  int dim_;
  std::vector<Slot> slots_;  // [i * num_pairs + pair]
  std::optional<GridSpec> field_grid_;
};

// Higher-order part of the law. CubicCutoff is
//   R(q) = [C2 s(|q|/h_cut) + (1 - s(|q|/h_cut))] |q|^2 q
// with s the C^2 smoothstep plateau (s = 1 below 1/2, s = 0 above 1).
struct ResidualSpec {
  enum class Kind { Zero, CubicCutoff };
  Kind kind = Kind::Zero;
  double c2 = 0.0;
  double h_cut = 1.0;

  Vec eval(const Vec& q, int dim) const;
};

ResidualSpec make_cutoff_residual(double c2, double h_cut);

// C^2 smoothstep: 1 for r <= 1/2, 0 for r >= 1.
double smoothstep_cutoff(double r);

struct MaterialLaw {
  ScalarField gamma;
  QuadCoeffs quad;
  ResidualSpec residual;

  int dim() const { return quad.dim(); }
  bool is_linear() const { return quad.is_zero() && residual.kind == ResidualSpec::Kind::Zero; }
};

// Validates gamma >= c0 > 0, gamma real, coefficient grid/dimension agreement.
MaterialLaw make_law(ScalarField gamma, QuadCoeffs quad, ResidualSpec residual = {});
void require_positive_gamma(const ScalarField& gamma);

Vec eval_p(const QuadCoeffs& quad, std::size_t node, const Vec& q);
Vec polarized_p(const QuadCoeffs& quad, std::size_t node, const Vec& q1, const Vec& q2);
// Nonlinear part Q = P + R.
Vec eval_q(const MaterialLaw& law, std::size_t node, const Vec& q);
Vec eval_c(const MaterialLaw& law, std::size_t node, const Vec& q);

// Node-wise application over gradient fields.
VectorField eval_p(const QuadCoeffs& quad, const VectorField& q);
VectorField eval_q(const MaterialLaw& law, const VectorField& q);

// Bilinear (non-conjugating) dot product.
Complex dot(const Vec& a, const Vec& b, int dim);

}  // namespace nldtn

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace nldtn {

using Complex = std::complex<double>;
using Point = std::array<double, 3>;
// Complex vector in R^dim; components beyond the grid dimension stay zero.
using Vec = std::array<Complex, 3>;

enum class DomainKind { UnitCube, UnitBall };

// One entry of a boundary trace: a boundary node seen from one of the faces
// it lies on. Edge and corner nodes appear once per incident face, so every
// sample has a well defined unit normal side * e_axis.
struct BoundarySample {
  std::size_t node;
  int axis;
  int side;  // -1 for the face x_axis = 0, +1 for x_axis = 1
  double weight;
};

// Immutable description of a discretization of [0,1]^dim (node-centred,
// M cells per axis) or of the unit ball centred at the origin (quadrature
// nodes only). Copies share the precomputed layout.
class GridSpec {
 public:
  int dim() const;
  int cells() const;
  double spacing() const;
  DomainKind kind() const;

  std::size_t num_nodes() const;
  std::size_t points_per_axis() const;  // M + 1 on the cube

  std::array<int, 3> multi_index(std::size_t node) const;
  std::size_t node_at(const std::array<int, 3>& idx) const;
  std::size_t stride(int axis) const;
  Point coords(std::size_t node) const;

  bool on_boundary(std::size_t node) const;
  std::span<const std::size_t> boundary_nodes() const;
  std::span<const BoundarySample> boundary_samples() const;
  std::span<const double> volume_weights() const;

  bool operator==(const GridSpec& other) const;

  struct Layout;  // opaque; defined in grid.cpp

 private:
  explicit GridSpec(std::shared_ptr<const Layout> layout) : layout_(std::move(layout)) {}
  friend GridSpec make_grid(int dim, int cells, DomainKind kind);

  std::shared_ptr<const Layout> layout_;
};

// Radial grading exponent of the ball product rule (r = rho^kappa).
inline constexpr double kBallGrading = 2.0;

GridSpec make_grid(int dim, int cells, DomainKind kind = DomainKind::UnitCube);

void require_same_grid(const GridSpec& a, const GridSpec& b);

class ScalarField {
 public:
  explicit ScalarField(GridSpec grid);
  ScalarField(GridSpec grid, std::vector<Complex> values);

  static ScalarField constant(const GridSpec& grid, Complex value);
  static ScalarField from_function(const GridSpec& grid,
                                   const std::function<Complex(const Point&)>& fn);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }

  double max_abs() const;
  double min_real() const;
  double max_abs_imag() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(Complex a);

 private:
  GridSpec grid_;
  std::vector<Complex> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(Complex a, ScalarField b);
ScalarField conj(ScalarField a);

class VectorField {
 public:
  explicit VectorField(GridSpec grid);
  VectorField(GridSpec grid, std::vector<Vec> values);

  const GridSpec& grid() const { return grid_; }
  int components() const { return grid_.dim(); }
  std::size_t size() const { return values_.size(); }
  Vec& operator[](std::size_t i) { return values_[i]; }
  const Vec& operator[](std::size_t i) const { return values_[i]; }

 private:
  GridSpec grid_;
  std::vector<Vec> values_;
};

class BoundaryTrace {
 public:
  explicit BoundaryTrace(GridSpec grid);
  BoundaryTrace(GridSpec grid, std::vector<Complex> values);

  // Trace of a function given in closed form.
  static BoundaryTrace from_function(const GridSpec& grid,
                                     const std::function<Complex(const Point&)>& fn);
  // Restriction of a nodal field to the boundary samples.
  static BoundaryTrace restrict(const ScalarField& u);
  // Unit outward normal component of every sample along `axis`.
  static BoundaryTrace normal_component(const GridSpec& grid, int axis);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  std::span<const Complex> values() const { return values_; }

  const BoundarySample& sample(std::size_t i) const { return grid_.boundary_samples()[i]; }
  Point normal(std::size_t i) const;
  double weight(std::size_t i) const { return sample(i).weight; }

  double max_abs() const;

  // Nodal values of the trace on boundary nodes (zero in the interior).
  // Throws InconsistentTrace if samples of one node disagree.
  ScalarField to_nodal(double tol = 1e-12) const;

  BoundaryTrace& operator+=(const BoundaryTrace& other);
  BoundaryTrace& operator-=(const BoundaryTrace& other);
  BoundaryTrace& operator*=(Complex a);

 private:
  GridSpec grid_;
  std::vector<Complex> values_;
};

BoundaryTrace operator+(BoundaryTrace a, const BoundaryTrace& b);
BoundaryTrace operator-(BoundaryTrace a, const BoundaryTrace& b);
BoundaryTrace operator*(Complex a, BoundaryTrace b);

// Centred second-order differences in the interior, one-sided second-order
// differences on the boundary.
VectorField gradient(const ScalarField& u);

// Conservative divergence of a nodal vector field: face values are averages of
// the two adjacent nodes. Defined on interior nodes; boundary entries are 0.
ScalarField divergence(const VectorField& w);

Complex integrate_volume(const ScalarField& w);
Complex integrate_boundary(const BoundaryTrace& b, const BoundaryTrace& g);

// Gauss-Legendre rule on [0,1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(int n);

}  // namespace nldtn

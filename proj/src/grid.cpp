#include "nldtn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nldtn/error.hpp"

namespace nldtn {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidDim: return "InvalidDim";
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InconsistentTrace: return "InconsistentTrace";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonContraction: return "NonContraction";
    case ErrorCode::NotNull: return "NotNull";
    case ErrorCode::InconsistentSamples: return "InconsistentSamples";
    case ErrorCode::BadIndices: return "BadIndices";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::QuadratureBudget: return "QuadratureBudget";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::MissingProbe: return "MissingProbe";
    case ErrorCode::NumericRange: return "NumericRange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

struct GridSpec::Layout {
  int dim = 0;
  int cells = 0;
  double h = 0.0;
  DomainKind kind = DomainKind::UnitCube;
  std::size_t n1 = 0;  // points per axis (cube)
  std::array<std::size_t, 3> strides{};
  std::size_t num_nodes = 0;
  std::vector<Point> coords;
  std::vector<double> volume_weights;
  std::vector<char> boundary_mask;
  std::vector<std::size_t> boundary_nodes;
  std::vector<BoundarySample> samples;
};

namespace {

void build_cube(GridSpec::Layout& L) {
  const std::size_t n1 = static_cast<std::size_t>(L.cells) + 1;
  L.n1 = n1;
  L.h = 1.0 / L.cells;
  L.strides = {1, n1, L.dim == 3 ? n1 * n1 : 0};
  L.num_nodes = L.dim == 2 ? n1 * n1 : n1 * n1 * n1;
  L.coords.resize(L.num_nodes);
  L.volume_weights.resize(L.num_nodes);
  L.boundary_mask.assign(L.num_nodes, 0);

  const auto edge = [&](int i) { return i == 0 || i == L.cells; };
  for (std::size_t n = 0; n < L.num_nodes; ++n) {
    std::array<int, 3> idx{static_cast<int>(n % n1), static_cast<int>((n / n1) % n1),
                           L.dim == 3 ? static_cast<int>(n / (n1 * n1)) : 0};
    double w = 1.0;
    bool boundary = false;
    for (int d = 0; d < L.dim; ++d) {
      L.coords[n][d] = idx[d] * L.h;
      w *= edge(idx[d]) ? 0.5 * L.h : L.h;
      boundary = boundary || edge(idx[d]);
    }
    // Exact node coordinate on the upper faces.
    for (int d = 0; d < L.dim; ++d)
      if (idx[d] == L.cells) L.coords[n][d] = 1.0;
    L.volume_weights[n] = w;
    if (boundary) {
      L.boundary_mask[n] = 1;
      L.boundary_nodes.push_back(n);
    }
  }

  // Faces in the order (axis 0, side -), (axis 0, side +), (axis 1, side -), ...
  for (int axis = 0; axis < L.dim; ++axis) {
    for (int side : {-1, 1}) {
      const int fixed = side < 0 ? 0 : L.cells;
      for (std::size_t n = 0; n < L.num_nodes; ++n) {
        std::array<int, 3> idx{static_cast<int>(n % n1), static_cast<int>((n / n1) % n1),
                               L.dim == 3 ? static_cast<int>(n / (n1 * n1)) : 0};
        if (idx[axis] != fixed) continue;
        double w = 1.0;
        for (int d = 0; d < L.dim; ++d)
          if (d != axis) w *= edge(idx[d]) ? 0.5 * L.h : L.h;
        L.samples.push_back({n, axis, side, w});
      }
    }
  }
}

void build_ball(GridSpec::Layout& L) {
  const int M = L.cells;
  L.h = 1.0 / M;
  const QuadratureRule radial = gauss_legendre(M);
  const int n_phi = 2 * M;
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  if (L.dim == 2) {
    for (int ir = 0; ir < M; ++ir) {
      const double rho = radial.nodes[ir];
      const double r = std::pow(rho, kBallGrading);
      const double dr = kBallGrading * std::pow(rho, kBallGrading - 1.0) * radial.weights[ir];
      for (int ip = 0; ip < n_phi; ++ip) {
        const double phi = ip * dphi;
        L.coords.push_back({r * std::cos(phi), r * std::sin(phi), 0.0});
        L.volume_weights.push_back(r * dr * dphi);
      }
    }
  } else {
    const QuadratureRule polar = gauss_legendre(M);
    for (int ir = 0; ir < M; ++ir) {
      const double rho = radial.nodes[ir];
      const double r = std::pow(rho, kBallGrading);
      const double dr = kBallGrading * std::pow(rho, kBallGrading - 1.0) * radial.weights[ir];
      for (int it = 0; it < M; ++it) {
        const double mu = 2.0 * polar.nodes[it] - 1.0;
        const double dmu = 2.0 * polar.weights[it];
        const double sin_t = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (int ip = 0; ip < n_phi; ++ip) {
          const double phi = ip * dphi;
          L.coords.push_back({r * sin_t * std::cos(phi), r * sin_t * std::sin(phi), r * mu});
          L.volume_weights.push_back(r * r * dr * dmu * dphi);
        }
      }
    }
  }
  L.num_nodes = L.coords.size();
  L.boundary_mask.assign(L.num_nodes, 0);
}

}  // namespace

GridSpec make_grid(int dim, int cells, DomainKind kind) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidDim, "dimension must be 2 or 3");
  if (cells < 4) throw Error(ErrorCode::InvalidResolution, "at least 4 cells per axis required");
  auto layout = std::make_shared<GridSpec::Layout>();
  layout->dim = dim;
  layout->cells = cells;
  layout->kind = kind;
  if (kind == DomainKind::UnitCube)
    build_cube(*layout);
  else
    build_ball(*layout);
  return GridSpec(std::move(layout));
}

int GridSpec::dim() const { return layout_->dim; }
int GridSpec::cells() const { return layout_->cells; }
double GridSpec::spacing() const { return layout_->h; }
DomainKind GridSpec::kind() const { return layout_->kind; }
std::size_t GridSpec::num_nodes() const { return layout_->num_nodes; }
std::size_t GridSpec::points_per_axis() const { return layout_->n1; }
std::size_t GridSpec::stride(int axis) const { return layout_->strides[axis]; }

std::array<int, 3> GridSpec::multi_index(std::size_t node) const {
  const std::size_t n1 = layout_->n1;
  return {static_cast<int>(node % n1), static_cast<int>((node / n1) % n1),
          layout_->dim == 3 ? static_cast<int>(node / (n1 * n1)) : 0};
}

std::size_t GridSpec::node_at(const std::array<int, 3>& idx) const {
  std::size_t n = 0;
  for (int d = 0; d < layout_->dim; ++d) n += static_cast<std::size_t>(idx[d]) * layout_->strides[d];
  return n;
}

Point GridSpec::coords(std::size_t node) const { return layout_->coords[node]; }
bool GridSpec::on_boundary(std::size_t node) const { return layout_->boundary_mask[node] != 0; }
std::span<const std::size_t> GridSpec::boundary_nodes() const { return layout_->boundary_nodes; }
std::span<const BoundarySample> GridSpec::boundary_samples() const { return layout_->samples; }
std::span<const double> GridSpec::volume_weights() const { return layout_->volume_weights; }

bool GridSpec::operator==(const GridSpec& other) const {
  if (layout_ == other.layout_) return true;
  return layout_->dim == other.layout_->dim && layout_->cells == other.layout_->cells &&
         layout_->kind == other.layout_->kind;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
}

namespace {
void require_cube(const GridSpec& g, const char* what) {
  if (g.kind() != DomainKind::UnitCube)
    throw Error(ErrorCode::InvalidDomain, std::string(what) + " requires a UnitCube grid");
}
}  // namespace

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(GridSpec grid) : grid_(std::move(grid)), values_(grid_.num_nodes()) {}

ScalarField::ScalarField(GridSpec grid, std::vector<Complex> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.num_nodes())
    throw Error(ErrorCode::GridMismatch, "value count does not match node count");
}

ScalarField ScalarField::constant(const GridSpec& grid, Complex value) {
  return ScalarField(grid, std::vector<Complex>(grid.num_nodes(), value));
}

ScalarField ScalarField::from_function(const GridSpec& grid,
                                       const std::function<Complex(const Point&)>& fn) {
  ScalarField f(grid);
  for (std::size_t n = 0; n < grid.num_nodes(); ++n) f[n] = fn(grid.coords(n));
  return f;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::min_real() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& v : values_) m = std::min(m, v.real());
  return m;
}

double ScalarField::max_abs_imag() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(Complex a) {
  for (auto& v : values_) v *= a;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(Complex a, ScalarField b) { return b *= a; }

ScalarField conj(ScalarField a) {
  for (auto& v : a.values()) v = std::conj(v);
  return a;
}

// ---------------------------------------------------------------------------
// VectorField

VectorField::VectorField(GridSpec grid) : grid_(std::move(grid)), values_(grid_.num_nodes()) {
  for (auto& v : values_) v = Vec{};
}

VectorField::VectorField(GridSpec grid, std::vector<Vec> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.num_nodes())
    throw Error(ErrorCode::GridMismatch, "value count does not match node count");
}

// ---------------------------------------------------------------------------
// BoundaryTrace

BoundaryTrace::BoundaryTrace(GridSpec grid)
    : grid_(std::move(grid)), values_(grid_.boundary_samples().size()) {}

BoundaryTrace::BoundaryTrace(GridSpec grid, std::vector<Complex> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.boundary_samples().size())
    throw Error(ErrorCode::GridMismatch, "value count does not match boundary sample count");
}

BoundaryTrace BoundaryTrace::from_function(const GridSpec& grid,
                                           const std::function<Complex(const Point&)>& fn) {
  require_cube(grid, "boundary traces");
  BoundaryTrace t(grid);
  const auto samples = grid.boundary_samples();
  for (std::size_t i = 0; i < samples.size(); ++i) t[i] = fn(grid.coords(samples[i].node));
  return t;
}

BoundaryTrace BoundaryTrace::restrict(const ScalarField& u) {
  require_cube(u.grid(), "boundary traces");
  BoundaryTrace t(u.grid());
  const auto samples = u.grid().boundary_samples();
  for (std::size_t i = 0; i < samples.size(); ++i) t[i] = u[samples[i].node];
  return t;
}

BoundaryTrace BoundaryTrace::normal_component(const GridSpec& grid, int axis) {
  require_cube(grid, "boundary traces");
  BoundaryTrace t(grid);
  const auto samples = grid.boundary_samples();
  for (std::size_t i = 0; i < samples.size(); ++i)
    t[i] = samples[i].axis == axis ? static_cast<double>(samples[i].side) : 0.0;
  return t;
}

Point BoundaryTrace::normal(std::size_t i) const {
  Point n{0.0, 0.0, 0.0};
  n[sample(i).axis] = sample(i).side;
  return n;
}

double BoundaryTrace::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

ScalarField BoundaryTrace::to_nodal(double tol) const {
  ScalarField u(grid_);
  std::vector<char> seen(grid_.num_nodes(), 0);
  const auto samples = grid_.boundary_samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::size_t n = samples[i].node;
    if (seen[n]) {
      const double scale = std::max(1.0, std::abs(u[n]));
      if (std::abs(u[n] - values_[i]) > tol * scale)
        throw Error(ErrorCode::InconsistentTrace, "boundary samples of one node disagree");
      continue;
    }
    seen[n] = 1;
    u[n] = values_[i];
  }
  return u;
}

BoundaryTrace& BoundaryTrace::operator+=(const BoundaryTrace& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

BoundaryTrace& BoundaryTrace::operator-=(const BoundaryTrace& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

BoundaryTrace& BoundaryTrace::operator*=(Complex a) {
  for (auto& v : values_) v *= a;
  return *this;
}

BoundaryTrace operator+(BoundaryTrace a, const BoundaryTrace& b) { return a += b; }
BoundaryTrace operator-(BoundaryTrace a, const BoundaryTrace& b) { return a -= b; }
BoundaryTrace operator*(Complex a, BoundaryTrace b) { return b *= a; }

// ---------------------------------------------------------------------------
// Discrete calculus

VectorField gradient(const ScalarField& u) {
  const GridSpec& g = u.grid();
  require_cube(g, "gradient");
  const int M = g.cells();
  const double inv2h = 0.5 / g.spacing();
  VectorField grad(g);
  for (std::size_t n = 0; n < g.num_nodes(); ++n) {
    const auto idx = g.multi_index(n);
    for (int d = 0; d < g.dim(); ++d) {
      const std::size_t s = g.stride(d);
      Complex v;
      if (idx[d] == 0)
        v = (-3.0 * u[n] + 4.0 * u[n + s] - u[n + 2 * s]) * inv2h;
      else if (idx[d] == M)
        v = (3.0 * u[n] - 4.0 * u[n - s] + u[n - 2 * s]) * inv2h;
      else
        v = (u[n + s] - u[n - s]) * inv2h;
      grad[n][d] = v;
    }
  }
  return grad;
}

ScalarField divergence(const VectorField& w) {
  const GridSpec& g = w.grid();
  require_cube(g, "divergence");
  const double inv2h = 0.5 / g.spacing();
  ScalarField div(g);
  for (std::size_t n = 0; n < g.num_nodes(); ++n) {
    if (g.on_boundary(n)) continue;
    Complex acc = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      const std::size_t s = g.stride(d);
      acc += (w[n + s][d] - w[n - s][d]) * inv2h;
    }
    div[n] = acc;
  }
  return div;
}

Complex integrate_volume(const ScalarField& w) {
  const auto weights = w.grid().volume_weights();
  Complex acc = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) acc += weights[n] * w[n];
  return acc;
}

Complex integrate_boundary(const BoundaryTrace& b, const BoundaryTrace& g) {
  require_same_grid(b.grid(), g.grid());
  Complex acc = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) acc += b[i] * g[i] * b.weight(i);
  return acc;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidParam, "Gauss-Legendre rule needs n >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] to [0,1], ascending order.
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

}  // namespace nldtn

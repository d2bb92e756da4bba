#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "nldtn/material.hpp"

namespace nldtn::cli {

// Boundary data given in closed form. Affine data keep their coefficients so
// experiments can compare against exact constant-gradient solutions.
struct Datum {
  std::string label;
  std::function<Complex(const Point&)> fn;
  bool affine = false;
  std::array<double, 3> gradient{};
  double offset = 0.0;

  BoundaryTrace trace(const GridSpec& grid) const { return BoundaryTrace::from_function(grid, fn); }
};

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

Datum affine_datum(const std::array<double, 3>& gradient, double offset);

// amplitude * a * sin(k . x + phase) with a in [0.5, 1.5], k_d in [0.5, 2],
// phase in [0, 2 pi).
Datum random_trig_datum(std::mt19937_64& rng, int dim, double amplitude);

// Constant coefficients with |c| in [lo, hi] and random signs.
QuadCoeffs random_constant_coeffs(std::mt19937_64& rng, int dim, double lo, double hi);

// {"kind": "affine", "gradient": [...], "offset": c} or
// {"kind": "trig", "amplitude": a, "count": n}. Trig specs draw from `rng`.
// With allow_count false a trig spec must describe a single datum.
std::vector<Datum> data_from_json(const nlohmann::json& spec, int dim, std::mt19937_64& rng, const std::string& path,
                                  bool allow_count = true);

}  // namespace nldtn::cli

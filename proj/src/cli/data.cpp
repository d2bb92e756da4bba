#include "nldtn/cli/data.hpp"

#include <cmath>
#include <numbers>

#include "nldtn/cli/law_io.hpp"
#include "nldtn/error.hpp"

namespace nldtn::cli {

using nlohmann::json;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Datum affine_datum(const std::array<double, 3>& gradient, double offset) {
  Datum d;
  d.affine = true;
  d.gradient = gradient;
  d.offset = offset;
  d.label = "affine";
  d.fn = [gradient, offset](const Point& x) {
    return Complex(offset + gradient[0] * x[0] + gradient[1] * x[1] + gradient[2] * x[2]);
  };
  return d;
}

Datum random_trig_datum(std::mt19937_64& rng, int dim, double amplitude) {
  const double a = amplitude * (0.5 + uniform01(rng));
  std::array<double, 3> k{};
  for (int d = 0; d < dim; ++d) k[d] = 0.5 + 1.5 * uniform01(rng);
  const double phase = 2.0 * std::numbers::pi * uniform01(rng);
  Datum d;
  d.label = "trig";
  d.fn = [a, k, phase](const Point& x) { return Complex(a * std::sin(k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + phase)); };
  return d;
}

QuadCoeffs random_constant_coeffs(std::mt19937_64& rng, int dim, double lo, double hi) {
  QuadCoeffs q(dim);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k)
      for (int l = k; l < dim; ++l) {
        const double mag = lo + (hi - lo) * uniform01(rng);
        q.set(i, k, l, uniform01(rng) < 0.5 ? -mag : mag);
      }
  return q;
}

std::vector<Datum> data_from_json(const json& spec, int dim, std::mt19937_64& rng, const std::string& path,
                                  bool allow_count) {
  auto fail = [&](const std::string& msg) -> void { throw Error(ErrorCode::ConfigInvalid, path + ": " + msg); };
  if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
    fail("expected an object with a string \"kind\"");
  }
  const std::string kind = spec["kind"].get<std::string>();
  if (kind == "affine") {
    require_keys(spec, {"kind", "gradient", "offset"}, path);
    std::array<double, 3> g{};
    if (spec.contains("gradient")) {
      const json& gj = spec["gradient"];
      if (!gj.is_array() || static_cast<int>(gj.size()) != dim) fail("gradient needs " + std::to_string(dim) + " numbers");
      for (int d = 0; d < dim; ++d) {
        if (!gj[d].is_number()) fail("gradient needs numbers");
        g[d] = gj[d].get<double>();
      }
    }
    double offset = 0.0;
    if (spec.contains("offset")) {
      if (!spec["offset"].is_number()) fail("offset must be a number");
      offset = spec["offset"].get<double>();
    }
    return {affine_datum(g, offset)};
  }
  if (kind == "trig") {
    require_keys(spec, {"kind", "amplitude", "count"}, path);
    double amp = 0.1;
    if (spec.contains("amplitude")) {
      if (!spec["amplitude"].is_number()) fail("amplitude must be a number");
      amp = spec["amplitude"].get<double>();
    }
    int count = 1;
    if (spec.contains("count")) {
      if (!spec["count"].is_number_integer() || spec["count"].get<int>() < 1) fail("count must be a positive integer");
      count = spec["count"].get<int>();
    }
    if (!allow_count && count != 1) fail("a single datum is expected here");
    std::vector<Datum> out;
    for (int c = 0; c < count; ++c) out.push_back(random_trig_datum(rng, dim, amp));
    return out;
  }
  fail("unknown kind \"" + kind + "\" (expected affine or trig)");
  return {};
}

}  // namespace nldtn::cli

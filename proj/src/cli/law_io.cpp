#include "nldtn/cli/law_io.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "nldtn/error.hpp"

namespace nldtn::cli {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ConfigInvalid, path + ": " + msg);
}

double number_at(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) invalid(path, std::string("missing \"") + key + "\"");
  if (!it->is_number()) invalid(path + "/" + key, "expected a number");
  return it->get<double>();
}

int index_at(const json& obj, const char* key, int dim, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) invalid(path, std::string("missing \"") + key + "\"");
  if (!it->is_number_integer()) invalid(path + "/" + key, "expected an integer");
  const int v = it->get<int>();
  if (v < 1 || v > dim) invalid(path + "/" + key, "index out of range 1.." + std::to_string(dim));
  return v - 1;
}

}  // namespace

void require_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!obj.is_object()) invalid(path, "expected an object");
  for (const auto& [key, val] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      invalid(path, "unknown field \"" + key + "\"");
  }
}

ScalarField profile_from_json(const json& doc, const GridSpec& grid, const std::string& path) {
  if (doc.is_number()) return ScalarField::constant(grid, doc.get<double>());
  if (doc.is_array()) {
    if (doc.size() != grid.num_nodes())
      invalid(path, "expected " + std::to_string(grid.num_nodes()) + " nodal values, got " +
                        std::to_string(doc.size()));
    std::vector<Complex> vals;
    vals.reserve(doc.size());
    for (const auto& v : doc) {
      if (!v.is_number()) invalid(path, "nodal values must be numbers");
      vals.emplace_back(v.get<double>());
    }
    return ScalarField(grid, std::move(vals));
  }
  if (doc.is_object()) {
    require_keys(doc, {"constant", "gradient"}, path);
    const double c = doc.contains("constant") ? number_at(doc, "constant", path) : 0.0;
    std::array<double, 3> g{};
    if (doc.contains("gradient")) {
      const json& gj = doc["gradient"];
      if (!gj.is_array() || static_cast<int>(gj.size()) != grid.dim())
        invalid(path + "/gradient", "expected " + std::to_string(grid.dim()) + " numbers");
      for (int d = 0; d < grid.dim(); ++d) {
        if (!gj[d].is_number()) invalid(path + "/gradient", "expected numbers");
        g[d] = gj[d].get<double>();
      }
    }
    return ScalarField::from_function(grid, [&](const Point& x) {
      double v = c;
      for (int d = 0; d < grid.dim(); ++d) v += g[d] * x[d];
      return Complex(v);
    });
  }
  invalid(path, "expected a number, an array of nodal values or {constant, gradient}");
}

MaterialLaw law_from_json(const json& doc, const GridSpec& grid) {
  const std::string root = "/law";
  require_keys(doc, {"gamma", "quad", "residual"}, root);
  const int dim = grid.dim();

  ScalarField gamma = doc.contains("gamma") ? profile_from_json(doc["gamma"], grid, root + "/gamma")
                                            : ScalarField::constant(grid, 1.0);

  QuadCoeffs quad(dim);
  if (doc.contains("quad")) {
    const json& q = doc["quad"];
    if (!q.is_array()) invalid(root + "/quad", "expected an array");
    std::set<std::pair<int, int>> seen;
    for (std::size_t e = 0; e < q.size(); ++e) {
      const std::string path = root + "/quad/" + std::to_string(e);
      const json& entry = q[e];
      require_keys(entry, {"i", "k", "l", "value", "field"}, path);
      const int i = index_at(entry, "i", dim, path);
      const int k = index_at(entry, "k", dim, path);
      const int l = index_at(entry, "l", dim, path);
      if (!seen.insert({i, QuadCoeffs::pair_index(dim, k, l)}).second)
        invalid(path, "coefficient given twice");
      const bool has_value = entry.contains("value");
      if (has_value == entry.contains("field")) invalid(path, "exactly one of \"value\" and \"field\" is required");
      if (has_value) {
        quad.set(i, k, l, number_at(entry, "value", path));
      } else {
        quad.set_field(i, k, l, profile_from_json(entry["field"], grid, path + "/field"));
      }
    }
  }

  ResidualSpec residual;
  if (doc.contains("residual")) {
    const std::string path = root + "/residual";
    const json& r = doc["residual"];
    require_keys(r, {"kind", "C2", "h_cut"}, path);
    if (!r.contains("kind") || !r["kind"].is_string()) invalid(path, "missing string \"kind\"");
    const std::string kind = r["kind"].get<std::string>();
    if (kind == "cubic_cutoff") {
      const double c2 = number_at(r, "C2", path);
      const double h = r.contains("h_cut") ? number_at(r, "h_cut", path) : 1.0;
      if (!(h > 0.0)) invalid(path + "/h_cut", "must be positive");
      residual = make_cutoff_residual(c2, h);
    } else if (kind != "none") {
      invalid(path + "/kind", "expected \"none\" or \"cubic_cutoff\"");
    }
  }

  try {
    return make_law(std::move(gamma), std::move(quad), residual);
  } catch (const Error& e) {
    invalid(root, e.what());
  }
}

json law_to_json(const MaterialLaw& law) {
  const GridSpec& grid = law.gamma.grid();
  auto profile = [](const ScalarField& f) -> json {
    bool uniform = true;
    for (std::size_t n = 1; n < f.size(); ++n) uniform = uniform && f[n] == f[0];
    if (uniform && f.size() > 0) return f[0].real();
    json arr = json::array();
    for (std::size_t n = 0; n < f.size(); ++n) arr.push_back(f[n].real());
    return arr;
  };

  json doc;
  doc["gamma"] = profile(law.gamma);
  json quad = json::array();
  const int dim = law.dim();
  for (int i = 0; i < dim; ++i) {
    for (int p = 0; p < QuadCoeffs::num_pairs(dim); ++p) {
      const auto [k, l] = QuadCoeffs::pair_at(dim, p);
      json entry{{"i", i + 1}, {"k", k + 1}, {"l", l + 1}};
      if (law.quad.is_field(i, k, l)) {
        json arr = json::array();
        for (std::size_t n = 0; n < grid.num_nodes(); ++n) arr.push_back(law.quad.at(i, k, l, n));
        entry["field"] = std::move(arr);
      } else {
        const double v = law.quad.at(i, k, l);
        if (v == 0.0) continue;
        entry["value"] = v;
      }
      quad.push_back(std::move(entry));
    }
  }
  doc["quad"] = std::move(quad);
  if (law.residual.kind == ResidualSpec::Kind::CubicCutoff) {
    doc["residual"] = {{"kind", "cubic_cutoff"}, {"C2", law.residual.c2}, {"h_cut", law.residual.h_cut}};
  } else {
    doc["residual"] = {{"kind", "none"}};
  }
  return doc;
}

}  // namespace nldtn::cli

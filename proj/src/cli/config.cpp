#include "nldtn/cli/config.hpp"

#include <array>

#include "nldtn/cli/law_io.hpp"
#include "nldtn/error.hpp"

namespace nldtn::cli {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Experiment, const char*>, 6> kNames{{
    {Experiment::Forward, "forward"},
    {Experiment::Asymptotics, "asymptotics"},
    {Experiment::Identity, "identity"},
    {Experiment::Cgo, "cgo"},
    {Experiment::Moments, "moments"},
    {Experiment::Recover, "recover"},
}};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); }

json quad_entry(int i, int k, int l, double v) { return {{"i", i}, {"k", k}, {"l", l}, {"value", v}}; }

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return !(a.is_number_integer() && !b.is_number_integer());
  return a.type() == b.type();
}

const char* kind_name(const json& v) {
  if (v.is_number_integer()) return "an integer";
  if (v.is_number()) return "a number";
  if (v.is_boolean()) return "a boolean";
  if (v.is_string()) return "a string";
  if (v.is_array()) return "an array";
  if (v.is_object()) return "an object";
  return "null";
}

// Overlays `user` on `defaults`; keys must exist in the defaults with a
// compatible type. Arrays and nested objects are replaced whole and checked
// further by the experiment that reads them.
void overlay(json& defaults, const json& user, const std::string& path) {
  if (!user.is_object()) invalid(path + ": expected an object");
  for (const auto& [key, val] : user.items()) {
    auto it = defaults.find(key);
    if (it == defaults.end()) invalid(path + ": unknown field \"" + key + "\"");
    if (!same_kind(val, *it)) invalid(path + "/" + key + ": expected " + kind_name(*it));
    *it = val;
  }
}

}  // namespace

const char* to_string(Experiment e) {
  for (const auto& [k, name] : kNames)
    if (k == e) return name;
  return "?";
}

std::optional<Experiment> experiment_from_string(const std::string& name) {
  for (const auto& [k, n] : kNames)
    if (name == n) return k;
  return std::nullopt;
}

json default_document(Experiment e) {
  json doc{{"schema_version", kSchemaVersion}, {"experiment", to_string(e)}, {"output_dir", "out"}, {"seed", 1},
           {"plot", true}};
  const json unit_law{{"gamma", 1.0}, {"quad", json::array({quad_entry(1, 1, 1, 1.0)})}};
  switch (e) {
    case Experiment::Forward:
      doc["grid"] = {{"dim", 2}, {"M", 32}};
      doc["law"] = {{"gamma", {{"constant", 1.0}, {"gradient", {0.5, 0.0}}}},
                    {"quad", json::array({quad_entry(1, 1, 1, 1.0), quad_entry(2, 1, 2, 0.5),
                                          quad_entry(1, 2, 2, -0.4)})}};
      doc["probes"] = {{"data", json::array({json{{"kind", "affine"}, {"gradient", {0.1, 0.05}}, {"offset", 0.0}},
                                             json{{"kind", "trig"}, {"count", 3}, {"amplitude", 0.1}}})},
                       {"extraction", "conservative"},
                       {"picard_tol", 1e-12},
                       {"picard_max_iter", 200}};
      doc["tolerances"] = {{"conservation", 1e-10}, {"affine_exact", 1e-8}, {"linear_collapse", 1e-10}};
      break;
    case Experiment::Asymptotics:
      doc["grid"] = {{"dim", 2}, {"M", 32}};
      doc["law"] = unit_law;
      doc["law"]["residual"] = {{"kind", "cubic_cutoff"}, {"C2", 1.0}, {"h_cut", 1.0}};
      doc["probes"] = {{"data", {{"kind", "affine"}, {"gradient", {1.0, 0.0}}, {"offset", 0.0}}},
                       {"t", {0.125, 0.0625, 0.03125, 0.015625, 0.0078125}}};
      doc["tolerances"] = {{"order_min", 0.8}, {"order_max", 1.3}, {"affine_deviation", 1e-8}};
      break;
    case Experiment::Identity:
      doc["grid"] = {{"dim", 2}, {"M", 64}};
      doc["law"] = {{"gamma", {{"constant", 1.0}, {"gradient", {0.5, 0.0}}}},
                    {"quad", json::array({quad_entry(1, 1, 1, 0.25), quad_entry(2, 1, 2, 0.125),
                                          quad_entry(1, 2, 2, -0.1)})}};
      doc["probes"] = {{"M_list", {16, 32, 64}},
                       {"t", {0.03125, 0.015625}},
                       {"f", {{"kind", "affine"}, {"gradient", {1.0, 0.5}}, {"offset", 0.0}}},
                       {"g", {{"kind", "affine"}, {"gradient", {1.0, -0.3}}, {"offset", 0.0}}}};
      doc["tolerances"] = {{"order_min", 1.8}, {"gap_max", 1e-3}};
      break;
    case Experiment::Cgo:
      doc["grid"] = {{"dim", 3}, {"M", 16}};
      doc["law"] = {{"gamma", 1.0},
                    {"quad", json::array({quad_entry(1, 3, 3, 1.0), quad_entry(2, 1, 2, 0.7),
                                          quad_entry(2, 2, 3, -0.4), quad_entry(3, 1, 1, 0.5),
                                          json{{"i", 3}, {"k", 2}, {"l", 3},
                                               {"field", {{"constant", 0.3}, {"gradient", {0.0, 0.0, 1.0}}}}}})}};
      doc["probes"] = {{"cases", json::array({json{{"k", {3.141592653589793, 0.0, 0.0}}, {"i", 1}},
                                              json{{"k", {1.0, 2.0, 0.5}}, {"i", 2}},
                                              json{{"k", {0.0, 0.0, 2.0}}, {"i", 3}}})},
                       {"s", {8.0, 16.0, 32.0}}};
      doc["tolerances"] = {{"pair_defect", 1e-12}, {"limit_rel", 0.02}};
      break;
    case Experiment::Moments:
      doc["grid"] = {{"dim", 3}, {"M", 16}};
      doc["law"] = json::object();
      doc["probes"] = {{"n_theta", 48}, {"n_psi", 48}, {"n_phi", 16}};
      doc["tolerances"] = {{"rel", 1e-3}, {"abs_zero", 1e-4}};
      break;
    case Experiment::Recover:
      doc["grid"] = {{"dim", 3}, {"M", 4}};
      doc["law"] = {{"gamma", 1.3}, {"quad", json::array()}};
      doc["probes"] = {{"draw", true},
                       {"eps", {0.1, 0.05, 0.025}},
                       {"tau", 0.05},
                       {"methods", {"closed_form", "pipeline", "oracle", "stages"}},
                       {"component_floor", 0.1},
                       {"max_condition", 1e6}};
      doc["tolerances"] = {{"closed_form", 1e-10}, {"pipeline_rel", 0.05}, {"oracle_rel", 0.05},
                           {"cross_rel", 0.05}, {"stages", 1e-10}};
      break;
  }
  return doc;
}

ExperimentConfig default_config(Experiment e) { return parse_config(default_document(e).dump(), "defaults"); }

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    // Line and column of the byte where parsing stopped.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(err.byte == 0 ? 0 : err.byte - 1, text.size());
    for (std::size_t b = 0; b < stop; ++b) {
      if (text[b] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    invalid(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" + err.what() +
            ")");
  }
  if (!doc.is_object()) invalid(source + ": top level must be an object");
  require_keys(doc, {"schema_version", "experiment", "grid", "law", "probes", "tolerances", "output_dir", "seed", "plot"},
               "");

  if (!doc.contains("schema_version")) invalid("missing \"schema_version\"");
  if (doc["schema_version"] != kSchemaVersion)
    invalid("/schema_version: unsupported version " + doc["schema_version"].dump() + " (expected \"1\")");
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) invalid("missing string \"experiment\"");
  const auto exp = experiment_from_string(doc["experiment"].get<std::string>());
  if (!exp) invalid("/experiment: unknown experiment " + doc["experiment"].dump());

  json base = default_document(*exp);
  ExperimentConfig cfg;
  cfg.experiment = *exp;

  json grid = base["grid"];
  if (doc.contains("grid")) overlay(grid, doc["grid"], "/grid");
  cfg.dim = grid["dim"].get<int>();
  cfg.M = grid["M"].get<int>();
  if (cfg.dim != 2 && cfg.dim != 3) invalid("/grid/dim: must be 2 or 3");
  if (cfg.M < 2 || cfg.M > 1024) invalid("/grid/M: must lie in [2, 1024]");

  // The law is checked against a grid once the experiment builds one.
  cfg.law = doc.contains("law") ? doc["law"] : base["law"];
  if (!cfg.law.is_object()) invalid("/law: expected an object");

  cfg.probes = base["probes"];
  if (doc.contains("probes")) overlay(cfg.probes, doc["probes"], "/probes");
  cfg.tolerances = base["tolerances"];
  if (doc.contains("tolerances")) overlay(cfg.tolerances, doc["tolerances"], "/tolerances");
  for (const auto& [key, val] : cfg.tolerances.items())
    if (!(val.get<double>() >= 0.0)) invalid("/tolerances/" + key + ": must be non-negative");

  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string() || doc["output_dir"].get<std::string>().empty())
      invalid("/output_dir: expected a non-empty string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) invalid("/seed: expected a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("plot")) {
    if (!doc["plot"].is_boolean()) invalid("/plot: expected a boolean");
    cfg.plot = doc["plot"].get<bool>();
  }
  return cfg;
}

}  // namespace nldtn::cli

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "nldtn/cli/config.hpp"
#include "nldtn/cli/data.hpp"
#include "nldtn/cli/law_io.hpp"
#include "nldtn/cli/report.hpp"
#include "nldtn/cli/runner.hpp"
#include "nldtn/error.hpp"

using namespace nldtn;
using namespace nldtn::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "t.json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
    return e.what();
  }
  FAIL("expected ConfigInvalid");
  return {};
}

std::string law_error(const json& doc, const GridSpec& g) {
  try {
    law_from_json(doc, g);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
    return e.what();
  }
  FAIL("expected ConfigInvalid");
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("nldtn_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

struct Run {
  int code = -1;
  std::string err;
};

// Runs the CLI with stdout discarded and stderr captured.
Run run_cli(const std::string& args, const fs::path& dir) {
  const fs::path errf = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + NLDTN_EXE + "\" " + args + " > /dev/null 2> \"" + errf.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(errf);
  return r;
}

fs::path write_config(const fs::path& dir, const json& doc) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("law documents round trip") {
  const auto g = make_grid(2, 4);
  const json doc = {
      {"gamma", {{"constant", 1.0}, {"gradient", {0.5, 0.0}}}},
      {"quad",
       {{{"i", 1}, {"k", 1}, {"l", 2}, {"value", 0.5}},
        {{"i", 2}, {"k", 2}, {"l", 2}, {"field", {{"constant", 0.1}, {"gradient", {0.0, 1.0}}}}}}},
      {"residual", {{"kind", "cubic_cutoff"}, {"C2", 2.0}, {"h_cut", 0.5}}}};
  const auto law = law_from_json(doc, g);
  CHECK(law.quad.at(0, 1, 0, 0) == 0.5);
  CHECK(law.quad.is_field(1, 1, 1));
  CHECK(law.residual.kind == ResidualSpec::Kind::CubicCutoff);
  const std::size_t n = g.node_at({4, 2, 0});
  CHECK(law.gamma[n].real() == doctest::Approx(1.5));

  const auto back = law_from_json(law_to_json(law), g);
  CHECK((back.gamma - law.gamma).max_abs() == 0.0);
  for (std::size_t m = 0; m < g.num_nodes(); ++m)
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k)
        for (int l = k; l < 2; ++l) CHECK(back.quad.at(i, k, l, m) == law.quad.at(i, k, l, m));
  CHECK(back.residual.c2 == 2.0);
  CHECK(back.residual.h_cut == 0.5);
}

TEST_CASE("law documents are validated with JSON paths") {
  const auto g = make_grid(2, 4);
  const json q111 = {{"i", 1}, {"k", 1}, {"l", 1}, {"value", 1.0}};
  CHECK(law_error({{"gamma", 1.0}, {"quad", {q111, q111}}}, g).find("/law/quad/1") != std::string::npos);
  CHECK(law_error({{"gamma", 1.0}, {"quad", {{{"i", 3}, {"k", 1}, {"l", 1}, {"value", 1.0}}}}}, g).find("/law/quad/0") !=
        std::string::npos);
  CHECK(law_error({{"gamma", 1.0}, {"colour", 1}}, g).find("colour") != std::string::npos);
  CHECK(law_error({{"gamma", {1.0, 2.0}}}, g).find("/law/gamma") != std::string::npos);
  CHECK(law_error({{"gamma", 1.0}, {"residual", {{"kind", "quartic"}}}}, g).find("/law/residual") !=
        std::string::npos);
}

TEST_CASE("config validation") {
  for (auto e : {Experiment::Forward, Experiment::Asymptotics, Experiment::Identity, Experiment::Cgo,
                 Experiment::Moments, Experiment::Recover}) {
    const auto cfg = default_config(e);
    CHECK(cfg.experiment == e);
    CHECK(experiment_from_string(to_string(e)) == e);
  }
  const auto cfg = parse_config(R"({"schema_version": "1", "experiment": "moments", "tolerances": {"rel": 1e-4}})");
  CHECK(cfg.tolerances["rel"].get<double>() == 1e-4);
  CHECK(cfg.tolerances["abs_zero"].get<double>() == 1e-4);
  CHECK(cfg.dim == 3);

  CHECK(config_error(R"({"schema_version": "1", "experiment": "moments", "colour": 1})").find("colour") !=
        std::string::npos);
  CHECK(config_error(R"({"schema_version": "1", "experiment": "moments", "probes": {"n_rho": 4}})")
            .find("/probes") != std::string::npos);
  CHECK(config_error(R"({"schema_version": "2", "experiment": "moments"})").find("schema_version") !=
        std::string::npos);
  CHECK(config_error(R"({"schema_version": "1", "experiment": "moments", "tolerances": {"rel": -1}})")
            .find("/tolerances/rel") != std::string::npos);
  CHECK(config_error(R"({"schema_version": "1", "experiment": "moments", "grid": {"dim": 4}})").find("/grid/dim") !=
        std::string::npos);
  CHECK(config_error(R"({"schema_version": "1", "experiment": "moments", "seed": -3})").find("/seed") !=
        std::string::npos);
  CHECK(config_error(R"({"schema_version": "1", "experiment": "moments", "probes": {"n_phi": "many"}})")
            .find("/probes/n_phi") != std::string::npos);
  CHECK(config_error(R"({"schema_version": "1", "experiment": "fly"})").find("/experiment") != std::string::npos);
  // Missing comma after the first member: reported at line 2.
  const std::string msg = config_error("{\"schema_version\": \"1\"\n  \"experiment\": \"moments\"}");
  CHECK(msg.find("t.json:2:") != std::string::npos);
}

TEST_CASE("shipped configs parse and match the defaults") {
  const fs::path dir = fs::path(NLDTN_SOURCE_DIR) / "configs";
  int count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    const auto cfg = parse_config(slurp(entry.path()), entry.path().string());
    CHECK(entry.path().stem().string() == to_string(cfg.experiment));
    const auto def = default_config(cfg.experiment);
    CHECK(cfg.probes == def.probes);
    CHECK(cfg.tolerances == def.tolerances);
    CHECK(cfg.law == def.law);
  }
  CHECK(count == 6);
  CHECK(fs::exists(fs::path(NLDTN_SOURCE_DIR) / "schema" / "experiment.schema.json"));
}

TEST_CASE("seeded draws") {
  std::mt19937_64 a(42), b(42);
  for (int n = 0; n < 100; ++n) {
    const double u = uniform01(a);
    CHECK(u == uniform01(b));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  std::mt19937_64 rng(3);
  const auto c = random_constant_coeffs(rng, 3, 0.2, 1.2);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int l = k; l < 3; ++l) {
        CHECK(std::abs(c.at(i, k, l)) >= 0.2);
        CHECK(std::abs(c.at(i, k, l)) <= 1.2);
      }
  const auto d = random_trig_datum(rng, 2, 0.1);
  CHECK_FALSE(d.affine);
  const auto g = make_grid(2, 8);
  CHECK(d.trace(g).max_abs() <= 0.15 + 1e-15);

  std::mt19937_64 r2(1);
  const auto aff = data_from_json({{"kind", "affine"}, {"gradient", {1.0, 2.0}}}, 2, r2, "/probes/data/0");
  REQUIRE(aff.size() == 1);
  CHECK(aff[0].affine);
  CHECK(aff[0].fn(Point{0.5, 0.25, 0.0}) == Complex(1.0));
  CHECK(data_from_json({{"kind", "trig"}, {"amplitude", 0.2}, {"count", 2}}, 2, r2, "/probes/data/1").size() == 2);
  CHECK_THROWS_AS(data_from_json({{"kind", "trig"}, {"amplitude", 0.2}, {"count", 2}}, 2, r2, "/probes/f", false),
                  Error);
}

TEST_CASE("report rows and formats") {
  ResultRow r{"x", {{"M", "16"}, {"t", "0.5"}}, 1.001, 1.0, Check::rel_err(1e-2)};
  CHECK(r.checked());
  CHECK(r.passed());
  CHECK(r.params_text() == "M=16;t=0.5");
  CHECK(*r.rel_err() == doctest::Approx(1e-3));
  ResultRow z{"z", {}, 5e-5, 0.0, Check::rel_or_abs(1e-3, 1e-4)};
  CHECK(z.passed());
  CHECK_FALSE(z.rel_err().has_value());
  CHECK_FALSE((ResultRow{"o", {}, 0.7, std::nullopt, Check::within(0.8, 1.3)}).passed());
  CHECK((ResultRow{"o", {}, 1.9, std::nullopt, Check::at_least(1.8)}).passed());
  CHECK((ResultRow{"i", {}, 3.0, std::nullopt, Check::info()}).passed());

  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_number(-2.0) == "-2");

  ExperimentOutput out{"demo", {}, {r, z}, {}};
  const auto csv = lines(to_csv(out));
  REQUIRE(csv.size() == 3);
  CHECK(csv[0] == "experiment,quantity,params,value,reference,abs_err,rel_err,check,pass");
  CHECK(csv[1].rfind("demo,x,M=16;t=0.5,1.001,1,", 0) == 0);
  CHECK(to_markdown(out).find("PASS") != std::string::npos);

  Plot p{"err", "h", "e", {{"e", {0.1, 0.05, 0.025}, {1e-2, 2.5e-3, 6.25e-4}}}};
  const auto svg = to_svg({p});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("in-process moments experiment") {
  const auto out = run_experiment(default_config(Experiment::Moments));
  int moments = 0;
  for (const auto& r : out.rows)
    if (r.quantity == "moment") {
      ++moments;
      CHECK(r.passed());
    }
  CHECK(moments == 36);
  CHECK(out.all_passed());
}

TEST_CASE("command line: moments defaults") {
  const auto dir = scratch("moments");
  const auto r = run_cli("moments --out \"" + (dir / "out").string() + "\"", dir);
  CHECK(r.code == kExitOk);
  const auto csv = lines(slurp(dir / "out" / "results.csv"));
  int rows = 0;
  for (std::size_t i = 1; i < csv.size(); ++i)
    if (csv[i].rfind("moments,moment,", 0) == 0) {
      ++rows;
      CHECK(csv[i].substr(csv[i].size() - 5) == ",PASS");
    }
  CHECK(rows == 36);
  CHECK(fs::exists(dir / "out" / "report.md"));
  CHECK(fs::exists(dir / "out" / "convergence.svg") == false);  // no convergence series for this experiment
}

TEST_CASE("command line: linear law collapses onto the linear map") {
  const auto dir = scratch("forward_linear");
  json doc = default_document(Experiment::Forward);
  doc["law"]["quad"] = json::array();
  doc["grid"]["M"] = 16;
  doc["output_dir"] = (dir / "out").string();
  const auto r = run_cli("forward --config \"" + write_config(dir, doc).string() + "\"", dir);
  CHECK(r.code == kExitOk);
  int collapse = 0;
  for (const auto& l : lines(slurp(dir / "out" / "results.csv")))
    if (l.rfind("forward,dn_minus_linear,", 0) == 0) {
      ++collapse;
      CHECK(l.substr(l.size() - 5) == ",PASS");
    }
  CHECK(collapse == 4);
}

TEST_CASE("command line: results are byte-identical across runs") {
  const auto dir = scratch("determinism");
  json doc = default_document(Experiment::Forward);
  doc["grid"]["M"] = 16;
  const auto cfg = write_config(dir, doc);
  CHECK(run_cli("forward --config \"" + cfg.string() + "\" --seed 5 --out \"" + (dir / "a").string() + "\"", dir).code ==
        kExitOk);
  CHECK(run_cli("forward --config \"" + cfg.string() + "\" --seed 5 --out \"" + (dir / "b").string() + "\"", dir).code ==
        kExitOk);
  CHECK(run_cli("forward --config \"" + cfg.string() + "\" --seed 6 --out \"" + (dir / "c").string() + "\"", dir).code ==
        kExitOk);
  const auto a = slurp(dir / "a" / "results.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(dir / "b" / "results.csv"));
  CHECK(a != slurp(dir / "c" / "results.csv"));
}

TEST_CASE("command line: exit codes") {
  const auto dir = scratch("exits");
  {
    const fs::path p = dir / "broken.json";
    std::ofstream(p) << "{\n  \"schema_version\": \"1\",\n  \"experiment\": \"moments\"\n  \"seed\": 3\n}\n";
    const auto r = run_cli("moments --config \"" + p.string() + "\"", dir);
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("broken.json:4:") != std::string::npos);
  }
  {
    json doc = default_document(Experiment::Cgo);
    const auto r = run_cli("moments --config \"" + write_config(dir, doc).string() + "\"", dir);
    CHECK(r.code == kExitConfig);
  }
  CHECK(run_cli("fly", dir).code == kExitConfig);
  CHECK(run_cli("moments --bogus", dir).code == kExitConfig);
  {
    // Curved data far outside the contraction regime.
    json doc = default_document(Experiment::Forward);
    doc["grid"]["M"] = 16;
    doc["probes"]["data"] = json::array({{{"kind", "trig"}, {"amplitude", 60.0}}});
    doc["output_dir"] = (dir / "nc").string();
    const auto r = run_cli("forward --config \"" + write_config(dir, doc).string() + "\"", dir);
    CHECK(r.code == kExitNumerical);
    CHECK(r.err.find("NonContraction") != std::string::npos);
  }
  {
    const fs::path blocker = dir / "file";
    std::ofstream(blocker) << "x";
    const auto r = run_cli("moments --out \"" + (blocker / "sub").string() + "\"", dir);
    CHECK(r.code == kExitIo);
  }
  {
    // A failed tolerance row gives exit 1 while still writing the report.
    json doc = default_document(Experiment::Moments);
    doc["tolerances"]["rel"] = 1e-20;
    doc["output_dir"] = (dir / "tight").string();
    const auto r = run_cli("moments --config \"" + write_config(dir, doc).string() + "\"", dir);
    CHECK(r.code == kExitToleranceFailed);
    CHECK(slurp(dir / "tight" / "report.md").find("FAIL") != std::string::npos);
  }
}

#include "nldtn/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>

#include "nldtn/asymptotics.hpp"
#include "nldtn/cgo.hpp"
#include "nldtn/cli/data.hpp"
#include "nldtn/cli/law_io.hpp"
#include "nldtn/error.hpp"
#include "nldtn/extrapolation.hpp"
#include "nldtn/forward.hpp"
#include "nldtn/singular.hpp"

namespace nldtn::cli {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); }

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double tol(const ExperimentConfig& cfg, const char* key) { return cfg.tolerances.at(key).get<double>(); }

std::vector<double> positive_list(const json& arr, const std::string& path, std::size_t min_size) {
  if (!arr.is_array() || arr.size() < min_size)
    invalid(path + ": expected at least " + std::to_string(min_size) + " numbers");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number() || !(v.get<double>() > 0.0)) invalid(path + ": expected positive numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void require_monotone(const std::vector<double>& v, bool decreasing, const std::string& path) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (decreasing ? !(v[i] < v[i - 1]) : !(v[i] > v[i - 1]))
      invalid(path + (decreasing ? ": must be strictly decreasing" : ": must be strictly increasing"));
}

bool uniform(const ScalarField& f) {
  for (std::size_t n = 1; n < f.size(); ++n)
    if (f[n] != f[0]) return false;
  return true;
}

bool constant_law(const MaterialLaw& law) { return uniform(law.gamma) && law.quad.is_constant(); }

// Row helpers.
ResultRow info(std::string q, std::vector<std::pair<std::string, std::string>> params, double value) {
  return {std::move(q), std::move(params), value, std::nullopt, Check::info()};
}
ResultRow compare(std::string q, std::vector<std::pair<std::string, std::string>> params, double value, double ref,
                  Check c) {
  return {std::move(q), std::move(params), value, ref, c};
}

std::string coeff_name(int i, int k, int l) {
  return "c" + std::to_string(i + 1) + "_" + std::to_string(k + 1) + std::to_string(l + 1);
}

ExperimentOutput run_forward(const ExperimentConfig& cfg) {
  const GridSpec grid = make_grid(cfg.dim, cfg.M);
  const MaterialLaw law = law_from_json(cfg.law, grid);
  std::mt19937_64 rng(cfg.seed);

  const json& pr = cfg.probes;
  if (!pr["data"].is_array() || pr["data"].empty()) invalid("/probes/data: expected a non-empty array");
  std::vector<Datum> data;
  for (std::size_t i = 0; i < pr["data"].size(); ++i)
    for (auto& d : data_from_json(pr["data"][i], cfg.dim, rng, "/probes/data/" + std::to_string(i)))
      data.push_back(std::move(d));

  ForwardOptions opts;
  const std::string ex = pr["extraction"].get<std::string>();
  if (ex == "pointwise") {
    opts.extraction = FluxExtraction::Pointwise;
  } else if (ex != "conservative") {
    invalid("/probes/extraction: expected \"conservative\" or \"pointwise\"");
  }
  opts.tol = pr["picard_tol"].get<double>();
  opts.max_iter = pr["picard_max_iter"].get<int>();
  if (!(opts.tol > 0.0)) invalid("/probes/picard_tol: must be positive");
  if (opts.max_iter < 1) invalid("/probes/picard_max_iter: must be at least 1");

  ExperimentOutput out;
  out.summary = {{"grid", std::to_string(cfg.dim) + "-D cube, M = " + std::to_string(cfg.M)},
                 {"extraction", ex},
                 {"law", law.is_linear() ? "linear" : "nonlinear"},
                 {"seed", std::to_string(cfg.seed)}};

  const BoundaryTrace one = BoundaryTrace::from_function(grid, [](const Point&) { return Complex(1.0); });
  const FluxOperator op(law.gamma);
  for (std::size_t d = 0; d < data.size(); ++d) {
    const BoundaryTrace f = data[d].trace(grid);
    const std::vector<std::pair<std::string, std::string>> p{{"datum", std::to_string(d)}, {"kind", data[d].label}};
    auto [u, rep] = solve_nonlinear(law, f, opts);
    const VectorField W = nonlinear_flux(law, u);
    const BoundaryTrace lc = boundary_flux(op, u, &W, opts.extraction);
    const BoundaryTrace lg = dn_linear(law.gamma, f, opts);

    out.rows.push_back(info("picard_iterations", p, rep.picard_iterations));
    const double tc = tol(cfg, "conservation");
    out.rows.push_back(compare("flux_integral_linear", p, std::abs(integrate_boundary(lg, one)), 0.0,
                               opts.extraction == FluxExtraction::Conservative ? Check::abs_err(tc) : Check::info()));
    out.rows.push_back(compare("flux_integral_nonlinear", p, std::abs(integrate_boundary(lc, one)), 0.0,
                               opts.extraction == FluxExtraction::Conservative ? Check::abs_err(tc) : Check::info()));
    if (law.is_linear())
      out.rows.push_back(compare("dn_minus_linear", p, (lc - lg).max_abs(), 0.0,
                                 Check::abs_err(tol(cfg, "linear_collapse"))));
    if (data[d].affine && constant_law(law)) {
      // Constant gradient a solves the problem exactly: Lambda = nu . C(a).
      Vec a{};
      for (int k = 0; k < cfg.dim; ++k) a[k] = data[d].gradient[k];
      const Vec c = eval_c(law, 0, a);
      double err = 0.0;
      for (std::size_t s = 0; s < lc.size(); ++s) {
        const BoundarySample& bs = lc.sample(s);
        err = std::max(err, std::abs(lc[s] - static_cast<double>(bs.side) * c[bs.axis]));
      }
      out.rows.push_back(compare("affine_exact", p, err, 0.0, Check::abs_err(tol(cfg, "affine_exact"))));
    }
  }
  return out;
}

ExperimentOutput run_asymptotics(const ExperimentConfig& cfg) {
  const GridSpec grid = make_grid(cfg.dim, cfg.M);
  const MaterialLaw law = law_from_json(cfg.law, grid);
  std::mt19937_64 rng(cfg.seed);
  const Datum datum = data_from_json(cfg.probes["data"], cfg.dim, rng, "/probes/data", false).front();
  const std::vector<double> t = positive_list(cfg.probes["t"], "/probes/t", 2);
  require_monotone(t, true, "/probes/t");

  const ExpansionResult res = second_order_from_data(law, datum.trace(grid), t);

  ExperimentOutput out;
  out.summary = {{"grid", std::to_string(cfg.dim) + "-D cube, M = " + std::to_string(cfg.M)},
                 {"datum", datum.label},
                 {"residual", law.residual.kind == ResidualSpec::Kind::Zero ? "none" : "cubic_cutoff"}};
  // Exact second-order data: constant law, R = 0 and affine f.
  const bool exact = datum.affine && constant_law(law) && law.residual.kind == ResidualSpec::Kind::Zero;
  for (double tf : res.failed_t) out.rows.push_back(info("non_contracting_t", {{"t", g(tf)}}, tf));
  for (std::size_t i = 0; i < res.t_values.size(); ++i) {
    const std::vector<std::pair<std::string, std::string>> p{{"t", g(res.t_values[i])}};
    out.rows.push_back(info("first_order_norm", p, res.first_order[i]));
    out.rows.push_back(compare("deviation", p, res.deviations[i], 0.0,
                               exact ? Check::abs_err(tol(cfg, "affine_deviation")) : Check::info()));
  }
  out.rows.push_back(info("extrapolated_deviation", {}, (res.extrapolated - res.reference).max_abs()));
  if (law.residual.kind == ResidualSpec::Kind::CubicCutoff) {
    out.rows.push_back({"fitted_order", {}, res.fitted_order, std::nullopt,
                        Check::within(tol(cfg, "order_min"), tol(cfg, "order_max"))});
  } else {
    out.rows.push_back(info("fitted_order", {}, res.fitted_order));
  }
  out.plots.push_back({"second-order deviation", "t", "max |D(t) - reference|",
                       {{"deviation", res.t_values, res.deviations}}});
  return out;
}

ExperimentOutput run_identity(const ExperimentConfig& cfg) {
  const json& pr = cfg.probes;
  if (!pr["M_list"].is_array() || pr["M_list"].size() < 2) invalid("/probes/M_list: expected at least two sizes");
  std::vector<int> Ms;
  for (const auto& v : pr["M_list"]) {
    if (!v.is_number_integer() || v.get<int>() < 2 || v.get<int>() > 1024)
      invalid("/probes/M_list: sizes must be integers in [2, 1024]");
    Ms.push_back(v.get<int>());
  }
  for (std::size_t i = 1; i < Ms.size(); ++i)
    if (Ms[i] <= Ms[i - 1]) invalid("/probes/M_list: must be strictly increasing");
  const std::vector<double> t = positive_list(pr["t"], "/probes/t", 2);
  require_monotone(t, true, "/probes/t");
  std::mt19937_64 rng(cfg.seed);
  const Datum f = data_from_json(pr["f"], cfg.dim, rng, "/probes/f", false).front();
  const Datum gd = data_from_json(pr["g"], cfg.dim, rng, "/probes/g", false).front();

  std::vector<MaterialLaw> laws;
  for (int M : Ms) laws.push_back(law_from_json(cfg.law, make_grid(cfg.dim, M)));

  ExperimentOutput out;
  out.summary = {{"dim", std::to_string(cfg.dim)}, {"t", g(t[t.size() - 2]) + ", " + g(t.back()) + " (last two)"}};
  std::vector<double> hs, gaps;
  for (std::size_t m = 0; m < Ms.size(); ++m) {
    const GridSpec& grid = laws[m].gamma.grid();
    const IdentityGap r = divergence_identity_gap(laws[m], f.trace(grid), gd.trace(grid), t);
    const std::vector<std::pair<std::string, std::string>> p{{"M", std::to_string(Ms[m])}};
    out.rows.push_back(info("boundary_side", p, r.boundary.real()));
    out.rows.push_back(info("volume_side", p, r.volume.real()));
    out.rows.push_back(info("gap", p, r.gap));
    hs.push_back(1.0 / Ms[m]);
    gaps.push_back(r.gap);
  }
  out.rows.push_back({"gap_order", {}, fitted_slope(hs, gaps), std::nullopt, Check::at_least(tol(cfg, "order_min"))});
  out.rows.push_back({"gap_finest", {{"M", std::to_string(Ms.back())}}, gaps.back(), std::nullopt,
                      Check::at_most(tol(cfg, "gap_max"))});
  out.plots.push_back({"boundary-volume identity gap", "h", "gap", {{"gap", hs, gaps}}});
  return out;
}

Complex box_factor(double kappa) {
  if (kappa == 0.0) return 1.0;
  return (std::exp(Complex(0.0, kappa)) - 1.0) / Complex(0.0, kappa);
}

ExperimentOutput run_cgo(const ExperimentConfig& cfg) {
  if (cfg.dim != 3) invalid("/grid/dim: the cgo experiment runs in 3-D");
  const GridSpec grid = make_grid(3, cfg.M);
  const MaterialLaw law = law_from_json(cfg.law, grid);
  if (!uniform(law.gamma)) invalid("/law/gamma: the cgo experiment needs a constant gamma");
  const double gamma = law.gamma[0].real();

  struct Case {
    Real3 k;
    int i;
  };
  std::vector<Case> cases;
  const json& cj = cfg.probes["cases"];
  if (!cj.is_array() || cj.empty()) invalid("/probes/cases: expected a non-empty array");
  for (std::size_t c = 0; c < cj.size(); ++c) {
    const std::string path = "/probes/cases/" + std::to_string(c);
    require_keys(cj[c], {"k", "i"}, path);
    Case cs{};
    if (!cj[c].contains("k") || !cj[c]["k"].is_array() || cj[c]["k"].size() != 3) invalid(path + "/k: expected 3 numbers");
    for (int d = 0; d < 3; ++d) {
      if (!cj[c]["k"][d].is_number()) invalid(path + "/k: expected numbers");
      cs.k[d] = cj[c]["k"][d].get<double>();
    }
    if (!cj[c].contains("i") || !cj[c]["i"].is_number_integer() || cj[c]["i"].get<int>() < 1 || cj[c]["i"].get<int>() > 3)
      invalid(path + "/i: expected an integer in 1..3");
    cs.i = cj[c]["i"].get<int>() - 1;
    cases.push_back(cs);
  }
  const std::vector<double> s = positive_list(cfg.probes["s"], "/probes/s", 1);
  require_monotone(s, false, "/probes/s");

  ExperimentOutput out;
  out.summary = {{"grid", "3-D cube, M = " + std::to_string(cfg.M)}, {"gamma", g(gamma)}};
  Plot plot{"CGO limit mismatch", "s", "|normalized(s) - fourier| / |fourier|", {}};
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const Case& cs = cases[c];
    const std::string kstr = g(cs.k[0]) + " " + g(cs.k[1]) + " " + g(cs.k[2]);
    const std::vector<std::pair<std::string, std::string>> base{{"case", std::to_string(c)}, {"k", kstr},
                                                                {"i", std::to_string(cs.i + 1)}};
    for (double sv : s) {
      auto p = base;
      p.emplace_back("s", g(sv));
      out.rows.push_back(compare("pair_defect", p, cgo_pair_defect(make_cgo_pair(cs.k, sv)), 0.0,
                                 Check::abs_err(tol(cfg, "pair_defect"))));
    }
    const CgoLimitResult lim = cgo_limit_form(law.quad, gamma, cs.k, s, cs.i, grid);
    const Complex fs = fourier_sample(law.quad, gamma, lim.zeta, cs.k, cs.i, grid);
    Series series{"case " + std::to_string(c), {}, {}};
    for (std::size_t m = 0; m < s.size(); ++m) {
      auto p = base;
      p.emplace_back("s", g(s[m]));
      const double mis = std::abs(lim.normalized[m] - fs) / std::abs(fs);
      const bool last = m + 1 == s.size();
      out.rows.push_back({"limit_mismatch", p, mis, std::nullopt,
                          last ? Check::at_most(tol(cfg, "limit_rel")) : Check::info()});
      series.x.push_back(s[m]);
      series.y.push_back(mis);
    }
    plot.series.push_back(std::move(series));
    out.rows.push_back(info("fourier_re", base, fs.real()));
    out.rows.push_back(info("fourier_im", base, fs.imag()));
    out.rows.push_back(info("extrapolated_mismatch", base, std::abs(lim.extrapolated - fs) / std::abs(fs)));
    out.rows.push_back(info("fitted_p", base, lim.fitted_p));
    if (law.quad.is_constant()) {
      const Complex exact = null_form(law.quad, cs.i, lim.zeta.zeta) / gamma * box_factor(cs.k[0]) *
                            box_factor(cs.k[1]) * box_factor(cs.k[2]);
      out.rows.push_back(compare("fourier_vs_closed_form", base, std::abs(fs - exact), 0.0, Check::info()));
    }
  }
  out.plots.push_back(std::move(plot));
  return out;
}

ExperimentOutput run_moments(const ExperimentConfig& cfg) {
  HalfSpaceRule rule;
  rule.n_theta = cfg.probes["n_theta"].get<int>();
  rule.n_psi = cfg.probes["n_psi"].get<int>();
  rule.n_phi = cfg.probes["n_phi"].get<int>();
  if (rule.n_theta < 4 || rule.n_psi < 4 || rule.n_phi < 4) invalid("/probes: quadrature sizes must be at least 4");

  const MomentTable table = build_moment_table(standard_frames(), rule);
  ExperimentOutput out;
  out.summary = {{"rule", "theta " + std::to_string(rule.n_theta) + ", psi " + std::to_string(rule.n_psi) +
                              ", phi " + std::to_string(rule.n_phi)}};
  for (const MomentRow& r : table.rows) {
    out.rows.push_back(compare("moment",
                               {{"frame_s", std::to_string(r.frame.s + 1)},
                                {"frame_t", std::to_string(r.frame.t + 1)},
                                {"alpha", g(r.frame.alpha)},
                                {"beta", g(r.frame.beta)},
                                {"k", std::to_string(r.k + 1)},
                                {"l", std::to_string(r.l + 1)}},
                               r.quadrature, r.closed_form,
                               Check::rel_or_abs(tol(cfg, "rel"), tol(cfg, "abs_zero"))));
  }
  return out;
}

ExperimentOutput run_recover(const ExperimentConfig& cfg) {
  if (cfg.dim != 3) invalid("/grid/dim: the recover experiment runs in 3-D");
  const GridSpec grid = make_grid(3, cfg.M);
  const json& pr = cfg.probes;
  std::mt19937_64 rng(cfg.seed);

  MaterialLaw law = law_from_json(cfg.law, grid);
  if (pr["draw"].get<bool>()) {
    if (!law.quad.is_zero()) invalid("/law/quad: must be empty when /probes/draw is true");
    law = make_law(law.gamma, random_constant_coeffs(rng, 3, 0.2, 1.2), law.residual);
  }
  if (!law.quad.is_constant()) invalid("/law/quad: recovery needs constant coefficients");
  const QuadCoeffs& c = law.quad;

  std::vector<std::string> methods;
  for (const auto& m : pr["methods"]) {
    if (!m.is_string()) invalid("/probes/methods: expected strings");
    const std::string name = m.get<std::string>();
    if (name != "closed_form" && name != "pipeline" && name != "oracle" && name != "stages")
      invalid("/probes/methods: unknown method \"" + name + "\"");
    methods.push_back(name);
  }
  auto wants = [&](const char* name) { return std::find(methods.begin(), methods.end(), name) != methods.end(); };
  const std::vector<double> eps = positive_list(pr["eps"], "/probes/eps", 2);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps[i] > 0.2) invalid("/probes/eps: values must lie in (0, 0.2]");
    if (i > 0 && std::abs(eps[i] - 0.5 * eps[i - 1]) > 1e-12 * eps[i - 1])
      invalid("/probes/eps: values must halve");
  }
  const double tau = pr["tau"].get<double>();
  if (!(tau > 0.0)) invalid("/probes/tau: must be positive");
  const double floor = pr["component_floor"].get<double>();
  const double max_cond = pr["max_condition"].get<double>();
  if (wants("oracle") && (!uniform(law.gamma) || law.residual.kind != ResidualSpec::Kind::Zero))
    invalid("/law: the oracle needs a constant gamma and no residual");

  ExperimentOutput out;
  out.summary = {{"coefficients", pr["draw"].get<bool>() ? "drawn from seed " + std::to_string(cfg.seed) : "from law"},
                 {"eps", g(eps.front()) + " .. " + g(eps.back())}};

  const auto frames = standard_frames();
  auto per_component = [&](const std::string& q, const QuadCoeffs& rec, const QuadCoeffs& ref, Check chk,
                           bool floor_applies) {
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (int l = k; l < 3; ++l) {
          const double r = ref.at(i, k, l);
          const bool checked = !floor_applies || std::abs(r) > floor;
          out.rows.push_back(compare(q, {{"coeff", coeff_name(i, k, l)}}, rec.at(i, k, l), r,
                                     checked ? chk : Check::info()));
        }
  };

  if (wants("closed_form")) {
    const Recovery rec = assemble_and_recover(closed_form_measurements(c, frames), frames, max_cond);
    out.rows.push_back(info("moment_condition", {}, rec.condition));
    per_component("closed_form", rec.coeffs, c, Check::abs_err(tol(cfg, "closed_form")), false);
  }

  std::optional<QuadCoeffs> pipeline, oracle;
  if (wants("pipeline")) {
    std::map<std::pair<int, int>, double> meas;
    Plot plot{"probe integrals vs eps (j = 1)", "eps", "|value - closed-form limit|", {}};
    const auto limits = closed_form_measurements(c, frames);
    for (std::size_t f = 0; f < frames.size(); ++f)
      for (int j = 0; j < 3; ++j) {
        std::vector<double> vals;
        for (double e : eps) vals.push_back(scaled_probe_integral(c, frames[f], j, e));
        const EpsLimit lim = eps_limit(eps, vals);
        meas[{static_cast<int>(f), j}] = lim.value;
        out.rows.push_back(info("eps_order", {{"frame", std::to_string(f)}, {"j", std::to_string(j + 1)}}, lim.order));
        if (j == 0) {
          Series sr{"frame " + std::to_string(f), eps, {}};
          for (double v : vals) sr.y.push_back(std::abs(v - limits.at({static_cast<int>(f), j})));
          plot.series.push_back(std::move(sr));
        }
      }
    const Recovery rec = assemble_and_recover(meas, frames, max_cond);
    per_component("pipeline", rec.coeffs, c, Check::rel_err(tol(cfg, "pipeline_rel")), true);
    pipeline = rec.coeffs;
    out.plots.push_back(std::move(plot));
  }
  if (wants("oracle")) {
    oracle = affine_probe_recover(law, tau);
    per_component("oracle", *oracle, c, Check::rel_err(tol(cfg, "oracle_rel")), true);
  }
  if (pipeline && oracle) {
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (int l = k; l < 3; ++l) {
          const bool checked = std::abs(c.at(i, k, l)) > floor;
          out.rows.push_back(compare("pipeline_vs_oracle", {{"coeff", coeff_name(i, k, l)}}, pipeline->at(i, k, l),
                                     oracle->at(i, k, l),
                                     checked ? Check::rel_err(tol(cfg, "cross_rel")) : Check::info()));
        }
  }
  if (wants("stages")) {
    const Stage1Result s1 = stage1_reduce(exact_stage1_samples(c));
    const Complex I(0.0, 1.0);
    const Real3 lambda = stage2_recover(stage2_sample(c, 0, Vec{1.0, I, 0.0}), stage2_sample(c, 0, Vec{1.0, 0.0, I}));
    per_component("stages", combine_stages(s1, lambda), c, Check::abs_err(tol(cfg, "stages")), false);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  os << text;
  os.close();
  if (!os) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  switch (cfg.experiment) {
    case Experiment::Forward: out = run_forward(cfg); break;
    case Experiment::Asymptotics: out = run_asymptotics(cfg); break;
    case Experiment::Identity: out = run_identity(cfg); break;
    case Experiment::Cgo: out = run_cgo(cfg); break;
    case Experiment::Moments: out = run_moments(cfg); break;
    case Experiment::Recover: out = run_recover(cfg); break;
  }
  out.experiment = to_string(cfg.experiment);
  return out;
}

void write_outputs(const ExperimentOutput& out, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create output directory " + dir.string());
  write_file(dir / "results.csv", to_csv(out));
  write_file(dir / "report.md", to_markdown(out));
  if (cfg.plot && !out.plots.empty()) write_file(dir / "convergence.svg", to_svg(out.plots));
}

}  // namespace nldtn::cli

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nldtn::cli {

// What a row is checked against. Info rows carry no tolerance.
struct Check {
  enum class Kind { Info, AbsErr, RelErr, RelOrAbs, AtMost, AtLeast, Within };
  Kind kind = Kind::Info;
  double lo = 0.0;  // AtLeast / Within lower bound; RelOrAbs absolute bound for zero references
  double hi = 0.0;  // tolerance or upper bound

  static Check info() { return {}; }
  static Check abs_err(double tol) { return {Kind::AbsErr, 0.0, tol}; }
  static Check rel_err(double tol) { return {Kind::RelErr, 0.0, tol}; }
  static Check rel_or_abs(double rel, double abs) { return {Kind::RelOrAbs, abs, rel}; }
  static Check at_most(double v) { return {Kind::AtMost, 0.0, v}; }
  static Check at_least(double v) { return {Kind::AtLeast, v, 0.0}; }
  static Check within(double lo, double hi) { return {Kind::Within, lo, hi}; }
};

struct ResultRow {
  std::string quantity;
  std::vector<std::pair<std::string, std::string>> params;
  double value = 0.0;
  std::optional<double> reference;
  Check check;

  std::optional<double> abs_err() const;
  std::optional<double> rel_err() const;  // empty without a nonzero reference
  bool checked() const { return check.kind != Check::Kind::Info; }
  bool passed() const;
  std::string rule() const;
  std::string params_text() const;  // key=value;key=value
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
};

struct ExperimentOutput {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> summary;  // shown at the top of report.md
  std::vector<ResultRow> rows;
  std::vector<Plot> plots;

  bool all_passed() const;
};

// Shortest round-trip decimal form ("%.17g" trimmed), '.' separator.
std::string format_number(double v);

// Long format: experiment,quantity,params,value,reference,abs_err,rel_err,check,pass
std::string to_csv(const ExperimentOutput& out);
std::string to_markdown(const ExperimentOutput& out);
// Log-log panels stacked vertically, decade ticks; nonpositive points are dropped.
std::string to_svg(const std::vector<Plot>& plots);

}  // namespace nldtn::cli

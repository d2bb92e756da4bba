#include "nldtn/cli/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nldtn::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::optional<double> ResultRow::abs_err() const {
  if (!reference) return std::nullopt;
  return std::abs(value - *reference);
}

std::optional<double> ResultRow::rel_err() const {
  if (!reference || *reference == 0.0) return std::nullopt;
  return std::abs(value - *reference) / std::abs(*reference);
}

bool ResultRow::passed() const {
  const double a = abs_err().value_or(std::numeric_limits<double>::quiet_NaN());
  switch (check.kind) {
    case Check::Kind::Info: return true;
    case Check::Kind::AbsErr: return a <= check.hi;
    case Check::Kind::RelErr: return rel_err() && *rel_err() <= check.hi;
    case Check::Kind::RelOrAbs: return rel_err() ? *rel_err() <= check.hi : a <= check.lo;
    case Check::Kind::AtMost: return value <= check.hi;
    case Check::Kind::AtLeast: return value >= check.lo;
    case Check::Kind::Within: return value >= check.lo && value <= check.hi;
  }
  return false;
}

std::string ResultRow::rule() const {
  switch (check.kind) {
    case Check::Kind::Info: return "";
    case Check::Kind::AbsErr: return "abs_err <= " + short_number(check.hi);
    case Check::Kind::RelErr: return "rel_err <= " + short_number(check.hi);
    case Check::Kind::RelOrAbs:
      return reference && *reference == 0.0 ? "abs_err <= " + short_number(check.lo)
                                            : "rel_err <= " + short_number(check.hi);
    case Check::Kind::AtMost: return "value <= " + short_number(check.hi);
    case Check::Kind::AtLeast: return "value >= " + short_number(check.lo);
    case Check::Kind::Within: return "value in [" + short_number(check.lo) + ", " + short_number(check.hi) + "]";
  }
  return "";
}

std::string ResultRow::params_text() const {
  std::string s;
  for (const auto& [k, v] : params) {
    if (!s.empty()) s += ';';
    s += k + "=" + v;
  }
  return s;
}

bool ExperimentOutput::all_passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.passed(); });
}

std::string to_csv(const ExperimentOutput& out) {
  std::string s = "experiment,quantity,params,value,reference,abs_err,rel_err,check,pass\n";
  for (const auto& r : out.rows) {
    s += out.experiment + "," + r.quantity + "," + r.params_text() + "," + format_number(r.value) + "," +
         opt_number(r.reference) + "," + opt_number(r.abs_err()) + "," + opt_number(r.rel_err()) + "," + r.rule() +
         "," + (r.checked() ? (r.passed() ? "PASS" : "FAIL") : "info") + "\n";
  }
  return s;
}

std::string to_markdown(const ExperimentOutput& out) {
  std::ostringstream md;
  md << "# " << out.experiment << "\n\n";
  for (const auto& [k, v] : out.summary) md << "- " << k << ": " << v << "\n";

  const auto n_checked = std::count_if(out.rows.begin(), out.rows.end(), [](const auto& r) { return r.checked(); });
  const auto n_failed = std::count_if(out.rows.begin(), out.rows.end(), [](const auto& r) { return !r.passed(); });
  md << "\n**" << (n_failed == 0 ? "PASS" : "FAIL") << "**: " << (n_checked - n_failed) << " of " << n_checked
     << " tolerance rows pass.\n\n";

  md << "| quantity | params | value | reference | abs_err | rel_err | tolerance | result |\n";
  md << "|---|---|---|---|---|---|---|---|\n";
  auto cell = [](const std::optional<double>& v) { return v ? short_number(*v) : std::string("-"); };
  for (const auto& r : out.rows) {
    md << "| " << r.quantity << " | " << r.params_text() << " | " << short_number(r.value) << " | "
       << cell(r.reference) << " | " << cell(r.abs_err()) << " | " << cell(r.rel_err()) << " | " << r.rule()
       << " | " << (r.checked() ? (r.passed() ? "PASS" : "FAIL") : "info") << " |\n";
  }
  return md.str();
}

std::string to_svg(const std::vector<Plot>& plots) {
  constexpr double W = 640, H = 400, left = 80, right = 170, top = 40, bottom = 60;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H * plots.size()
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";

  for (std::size_t p = 0; p < plots.size(); ++p) {
    const Plot& plot = plots[p];
    const double y0 = H * p;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : plot.series)
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!(s.x[i] > 0 && s.y[i] > 0)) continue;
        xmin = std::min(xmin, std::log10(s.x[i]));
        xmax = std::max(xmax, std::log10(s.x[i]));
        ymin = std::min(ymin, std::log10(s.y[i]));
        ymax = std::max(ymax, std::log10(s.y[i]));
      }
    svg << "<g transform=\"translate(0," << y0 << ")\">\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(plot.title)
        << "</text>\n";
    if (!(xmin <= xmax)) {
      svg << "<text x=\"" << W / 2 << "\" y=\"" << H / 2 << "\" text-anchor=\"middle\">no positive data</text>\n</g>\n";
      continue;
    }
    // Widen to whole decades so every panel shows at least one tick.
    xmin = std::floor(xmin);
    xmax = std::max(std::ceil(xmax), xmin + 1);
    ymin = std::floor(ymin);
    ymax = std::max(std::ceil(ymax), ymin + 1);
    const double pw = W - left - right, ph = H - top - bottom;
    auto X = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * ph; };

    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int d = static_cast<int>(xmin); d <= static_cast<int>(xmax); ++d) {
      svg << "<line x1=\"" << X(d) << "\" y1=\"" << top + ph << "\" x2=\"" << X(d) << "\" y2=\"" << top + ph + 5
          << "\" stroke=\"black\"/>";
      svg << "<text x=\"" << X(d) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">1e" << d
          << "</text>\n";
    }
    for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); ++d) {
      svg << "<line x1=\"" << left - 5 << "\" y1=\"" << Y(d) << "\" x2=\"" << left << "\" y2=\"" << Y(d)
          << "\" stroke=\"black\"/>";
      svg << "<text x=\"" << left - 8 << "\" y=\"" << Y(d) + 4 << "\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
        << xml_escape(plot.xlabel) << "</text>\n";
    svg << "<text transform=\"translate(20," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << xml_escape(plot.ylabel) << "</text>\n";

    for (std::size_t si = 0; si < plot.series.size(); ++si) {
      const Series& s = plot.series[si];
      const char* color = colors[si % std::size(colors)];
      std::string pts;
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!(s.x[i] > 0 && s.y[i] > 0)) continue;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(std::log10(s.x[i])), Y(std::log10(s.y[i])));
        pts += buf;
        svg << "<circle cx=\"" << X(std::log10(s.x[i])) << "\" cy=\"" << Y(std::log10(s.y[i])) << "\" r=\"3\" fill=\""
            << color << "\"/>";
      }
      svg << "\n<polyline fill=\"none\" stroke=\"" << color << "\" points=\"" << pts << "\"/>\n";
      const double ly = top + 14 + 18 * si;
      svg << "<line x1=\"" << W - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 30 << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\"/><text x=\"" << W - right + 35 << "\" y=\"" << ly + 4 << "\">"
          << xml_escape(s.label) << "</text>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace nldtn::cli

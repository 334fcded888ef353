#include "eqlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "eqlab/errors.hpp"

namespace eqlab {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;
constexpr std::size_t kMaxScatterPoints = 20000;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape_xml(const std::string& s) {
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

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Table::Table(std::string name, std::vector<std::string> header) : name_(std::move(name)), header_(std::move(header)) {
  if (header_.empty()) throw ContractError("a table needs at least one column");
}

void Table::add_row(std::vector<std::string> fields) {
  if (fields.size() != header_.size())
    throw ContractError("table " + name_ + " expects " + std::to_string(header_.size()) + " fields per row");
  rows_.push_back(std::move(fields));
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      const std::string& f = fields[i];
      if (f.find_first_of(",\"\r\n") == std::string::npos) {
        out += f;
        continue;
      }
      out += '"';
      for (char c : f) {
        if (c == '"') out += '"';
        out += c;
      }
      out += '"';
    }
    out += "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::string render_svg(const Plot& plot) {
  const bool log_y = plot.kind == Plot::Kind::LogLinear;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto ty = [log_y](double y) { return log_y ? std::log10(y) : y; };
  for (const Series& s : plot.series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pw = kWidth - 2 * kMargin, ph = kHeight - 2 * kMargin;
  auto px = [&](double x) { return kMargin + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kHeight - kMargin - (ty(y) - y0) / (y1 - y0) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\">" << escape_xml(plot.name) << "</text>\n";
  svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\">" << short_number(x0) << "</text>\n";
  svg << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\" text-anchor=\"end\">"
      << short_number(x1) << "</text>\n";
  const std::string ylo = log_y ? "1e" + short_number(y0) : short_number(y0);
  const std::string yhi = log_y ? "1e" + short_number(y1) : short_number(y1);
  svg << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin << "\" text-anchor=\"end\">" << ylo
      << "</text>\n";
  svg << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 10 << "\" text-anchor=\"end\">" << yhi << "</text>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">"
      << escape_xml(plot.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 16 " << kHeight / 2
      << ")\" text-anchor=\"middle\">" << escape_xml(plot.y_label) << "</text>\n";

  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const Series& s = plot.series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (plot.kind == Plot::Kind::Scatter) {
      const std::size_t step = std::max<std::size_t>(1, n / kMaxScatterPoints);
      for (std::size_t i = 0; i < n; i += step) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        svg << "<circle cx=\"" << short_number(px(s.x[i])) << "\" cy=\"" << short_number(py(s.y[i]))
            << "\" r=\"1\" fill=\"" << color << "\"/>\n";
      }
    } else {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
      for (std::size_t i = 0; i < n; ++i)
        if (std::isfinite(s.x[i]) && s.y[i] > 0.0 && std::isfinite(s.y[i]))
          svg << short_number(px(s.x[i])) << ',' << short_number(py(s.y[i])) << ' ';
      svg << "\"/>\n";
    }
    svg << "<text x=\"" << kWidth - kMargin - 4 << "\" y=\"" << kMargin + 16 + 14 * si << "\" text-anchor=\"end\" fill=\""
        << color << "\">" << escape_xml(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

bool ExperimentReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Table& ExperimentReport::table(const std::string& name) const {
  for (const Table& t : tables)
    if (t.name() == name) return t;
  throw ContractError("no table named " + name);
}

nlohmann::json ExperimentReport::summary() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["config"] = config;
  j["seed"] = seed;
  j["workers"] = workers;
  j["version"] = version;
  j["wall_seconds"] = wall_seconds;
  j["rerun"] = "eqlab " + subcommand + " --config <config> --seed " + std::to_string(seed);
  nlohmann::json tabs = nlohmann::json::array();
  for (const Table& t : tables) tabs.push_back({{"name", t.name()}, {"file", t.name() + ".csv"}, {"rows", t.rows()}});
  j["tables"] = tabs;
  nlohmann::json cs = nlohmann::json::array();
  for (const Check& c : checks) cs.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = cs;
  j["all_pass"] = all_pass();
  j["notes"] = notes;
  return j;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir, bool plots) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "summary.json", report.summary().dump(2) + "\n");
  for (const Table& t : report.tables) write_file(out_dir / (t.name() + ".csv"), t.to_csv());
  if (plots)
    for (const Plot& p : report.plots) write_file(out_dir / (p.name + ".svg"), render_svg(p));
}

}  // namespace eqlab

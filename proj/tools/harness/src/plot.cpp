#include "tscaledgd/harness/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace tsgd::harness {

namespace {

using Row = std::vector<std::string>;

struct Table {
  std::map<std::string, std::size_t> column;
  std::vector<Row> rows;

  bool has(std::initializer_list<const char*> names) const {
    return std::all_of(names.begin(), names.end(), [&](const char* n) { return column.count(n) > 0; });
  }
  const std::string& at(const Row& row, const char* name) const { return row[column.at(name)]; }
};

Row split(const std::string& line) {
  Row out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EmptyTraceSet("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) return t;
  const Row header = split(line);
  for (std::size_t i = 0; i < header.size(); ++i) t.column[header[i]] = i;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Row row = split(line);
    if (row.size() == header.size()) t.rows.push_back(std::move(row));
  }
  return t;
}

double number(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

std::string snr_from_run_id(const std::string& run_id) {
  const auto pos = run_id.find("_snr");
  if (pos == std::string::npos) return "inf";
  const auto end = run_id.find('_', pos + 4);
  return run_id.substr(pos + 4, end == std::string::npos ? std::string::npos : end - pos - 4);
}

std::string make_label(const std::string& method, const std::string& kappa, const std::string& transform,
                       const std::string& snr, bool show_transform) {
  std::string label = method + " κ=" + kappa;
  if (show_transform) label += " " + transform;
  if (snr != "inf") label += " SNR=" + snr + "dB";
  return label;
}

std::string escape(const std::string& s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "err_vs_iter") return PlotKind::kErrVsIter;
  if (name == "err_vs_time") return PlotKind::kErrVsTime;
  if (name == "err_vs_eta") return PlotKind::kErrVsEta;
  throw std::invalid_argument("unknown plot kind '" + std::string(name) +
                              "' (expected err_vs_iter, err_vs_time or err_vs_eta)");
}

std::vector<Series> load_series(const std::vector<std::filesystem::path>& files, PlotKind kind) {
  std::vector<Table> tables;
  for (const auto& f : files) tables.push_back(read_csv(f));

  std::set<std::string> transforms;
  for (const auto& t : tables) {
    if (!t.has({"transform"})) continue;
    for (const auto& row : t.rows) transforms.insert(t.at(row, "transform"));
  }
  const bool show_transform = transforms.size() > 1;

  std::vector<Series> out;
  if (kind == PlotKind::kErrVsEta) {
    using Key = std::tuple<std::string, std::string, double, std::string>;
    std::map<Key, std::vector<std::pair<double, double>>> groups;
    std::map<Key, std::string> labels;
    for (const auto& t : tables) {
      if (!t.has({"method", "transform", "kappa", "eta", "final_rel_err"})) continue;
      for (const auto& row : t.rows) {
        const std::string snr = t.has({"snr_db"}) ? t.at(row, "snr_db") : "inf";
        const Key key{t.at(row, "method"), t.at(row, "transform"), number(t.at(row, "kappa")), snr};
        groups[key].emplace_back(number(t.at(row, "eta")), number(t.at(row, "final_rel_err")));
        labels[key] = make_label(t.at(row, "method"), t.at(row, "kappa"), t.at(row, "transform"), snr, show_transform);
      }
    }
    for (auto& [key, points] : groups) {
      std::sort(points.begin(), points.end());
      Series s{labels[key], {}, {}};
      for (const auto& [x, y] : points) {
        s.x.push_back(x);
        s.y.push_back(std::isfinite(y) ? std::min(y, 1e2) : 1e2);
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  const char* x_column = kind == PlotKind::kErrVsIter ? "iter" : "wall_time_s";
  std::map<std::string, Series> by_run;
  for (const auto& t : tables) {
    if (!t.has({"run_id", "method", "kappa", "rel_err", "transform"}) || !t.has({x_column})) continue;
    for (const auto& row : t.rows) {
      const std::string& id = t.at(row, "run_id");
      auto [it, inserted] = by_run.try_emplace(id);
      if (inserted) {
        it->second.label = make_label(t.at(row, "method"), t.at(row, "kappa"), t.at(row, "transform"),
                                      snr_from_run_id(id), show_transform);
      }
      it->second.x.push_back(number(t.at(row, x_column)));
      it->second.y.push_back(number(t.at(row, "rel_err")));
    }
  }
  for (auto& [id, s] : by_run) out.push_back(std::move(s));
  return out;
}

std::string render_svg(const std::vector<Series>& series, const std::string& x_label, const std::string& title) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  std::size_t drawable = 0;
  for (const auto& s : series) {
    bool any = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.y[i] > 0.0) || !std::isfinite(s.y[i]) || !std::isfinite(s.x[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
      any = true;
    }
    drawable += any;
  }
  if (drawable == 0) throw EmptyTraceSet("no plottable points");
  if (xmax <= xmin) xmax = xmin + 1.0;
  const double dlo = std::floor(std::log10(ymin));
  double dhi = std::ceil(std::log10(ymax));
  if (dhi <= dlo) dhi = dlo + 1.0;

  constexpr double kW = 760, kH = 480, kLeft = 70, kRight = 220, kTop = 40, kBottom = 50;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (dhi - std::log10(y)) / (dhi - dlo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";

  const int decades = static_cast<int>(dhi - dlo);
  const int step = std::max(1, decades / 8);
  for (int d = 0; d <= decades; d += step) {
    const double e = dlo + d;
    const double y = py(std::pow(10.0, e));
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
        << num(y) << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e"
        << static_cast<int>(e) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double x = px(xv);
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x) << "\" y2=\""
        << num(kTop + ph) << "\" stroke=\"#f0f0f0\"/>\n";
    svg << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 16) << "\" text-anchor=\"middle\">"
        << tick(xv) << "</text>\n";
  }
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kH - 12) << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  svg << "<text transform=\"translate(18," << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">relative error</text>\n";

  std::size_t index = 0;
  for (const auto& s : series) {
    std::ostringstream points;
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.y[i] > 0.0) || !std::isfinite(s.y[i]) || !std::isfinite(s.x[i])) continue;
      points << (count++ ? " " : "") << num(px(s.x[i])) << "," << num(py(s.y[i]));
    }
    if (count == 0) continue;
    const char* color = kPalette[index % kPalette.size()];
    const char* dash = index / kPalette.size() % 2 ? " stroke-dasharray=\"6,3\"" : "";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << dash << " points=\""
        << points.str() << "\"/>\n";
    const double ly = kTop + 10 + 16.0 * static_cast<double>(index);
    svg << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kLeft + pw + 36)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash << "/>\n";
    svg << "<text x=\"" << num(kLeft + pw + 42) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
        << "</text>\n";
    ++index;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::size_t emit_plot(const std::vector<std::filesystem::path>& files, PlotKind kind,
                      const std::filesystem::path& out) {
  const auto series = load_series(files, kind);
  if (series.empty()) throw EmptyTraceSet("inputs contain no series for the requested axis");
  const char* x_label = kind == PlotKind::kErrVsIter ? "iteration" : kind == PlotKind::kErrVsTime ? "time (s)" : "step size η";
  const char* title = kind == PlotKind::kErrVsEta ? "final relative error vs step size" : "relative error";
  const std::string svg = render_svg(series, x_label, title);
  std::ofstream file(out);
  if (!file) throw std::runtime_error("cannot write " + out.string());
  file << svg;
  std::size_t drawn = 0;
  for (const auto& s : series) {
    drawn += std::any_of(s.y.begin(), s.y.end(), [](double y) { return y > 0.0 && std::isfinite(y); });
  }
  return drawn;
}

}  // namespace tsgd::harness

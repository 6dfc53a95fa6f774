#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsgd::harness {

enum class PlotKind { kErrVsIter, kErrVsTime, kErrVsEta };

PlotKind parse_plot_kind(std::string_view name);

/// No plottable series in the inputs (empty files, or files without the
/// columns the requested axis needs).
class EmptyTraceSet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// err_vs_iter and err_vs_time read trace CSVs (one series per run_id);
/// err_vs_eta reads summary CSVs (one series per method, transform, kappa
/// and SNR).
std::vector<Series> load_series(const std::vector<std::filesystem::path>& files, PlotKind kind);

/// Self-contained SVG with a log-scale y axis. Non-positive y values are
/// dropped. Throws EmptyTraceSet when nothing remains to draw.
std::string render_svg(const std::vector<Series>& series, const std::string& x_label, const std::string& title);

/// load_series + render_svg, written to `out`. Returns the number of curves.
std::size_t emit_plot(const std::vector<std::filesystem::path>& files, PlotKind kind,
                      const std::filesystem::path& out);

}  // namespace tsgd::harness

#include "robust_pr/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace robust_pr {

std::vector<PlotSpec> plots_from_aggregates(const std::vector<AggregateRecord>& aggregates, Statistic stat) {
  std::vector<PlotSpec> plots;
  for (XKind kind : {XKind::Iteration, XKind::SnrDb}) {
    PlotSpec spec;
    spec.x_axis = kind;
    for (const auto& a : aggregates) {
      if (a.x_kind != kind || a.stat != stat) continue;
      const std::string label(to_string(a.algorithm));
      auto it = std::find_if(spec.series.begin(), spec.series.end(),
                             [&](const PlotSeries& s) { return s.label == label; });
      if (it == spec.series.end()) {
        spec.series.push_back({label, {}, {}});
        it = spec.series.end() - 1;
      }
      it->x.push_back(a.x_value);
      it->y.push_back(a.nmse);
    }
    if (spec.series.empty()) continue;
    const std::string model(to_string(aggregates.front().model));
    const std::string what = kind == XKind::Iteration ? "iteration number" : "SNR";
    spec.title = std::string(to_string(stat)) + " NMSE versus " + what + " (" + model + " model)";
    const std::string stem = kind == XKind::Iteration ? "nmse_vs_iteration" : "nmse_vs_snr";
    spec.image_path = stem + ".svg";
    spec.csv_path = "aggregates.csv";
    plots.push_back(std::move(spec));
  }
  return plots;
}

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 80, kRight = 150, kTop = 40, kBottom = 60;
constexpr std::array<const char*, 4> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  if (spec.series.empty()) throw std::invalid_argument("plot has no series");

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : spec.series) {
    if (s.x.size() != s.y.size() || s.x.empty()) throw std::invalid_argument("malformed series '" + s.label + "'");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double ly = std::log10(std::max(s.y[i], kPlotFloor));
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, ly);
      ymax = std::max(ymax, ly);
    }
  }
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax <= ymin) ymax = ymin + 1;
  if (xmax <= xmin) xmax = xmin + 1;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double ly) { return kTop + (ymax - ly) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << spec.title
     << "</text>\n";

  // Decade grid.
  for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); ++d) {
    const double y = py(d);
    os << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(y) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << fmt(y)
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  constexpr int kXTicks = 8;
  for (int i = 0; i <= kXTicks; ++i) {
    const double xv = xmin + (xmax - xmin) * i / kXTicks;
    os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << fmt(xv)
       << "</text>\n";
  }
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">"
     << (spec.x_axis == XKind::Iteration ? "iteration" : "SNR (dB)") << "</text>\n";
  os << "<text transform=\"translate(20," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">NMSE</text>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* color = kColors[k % kColors.size()];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      os << (i ? " " : "") << fmt(px(s.x[i])) << ',' << fmt(py(std::log10(std::max(s.y[i], kPlotFloor))));
    os << "\"/>\n";
    if (s.x.size() <= 40) {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        os << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(std::log10(std::max(s.y[i], kPlotFloor))))
           << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 16 + 18 * static_cast<double>(k);
    os << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 36 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kLeft + pw + 42 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace robust_pr

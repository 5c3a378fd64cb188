#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "robust_pr/harness.hpp"

namespace robust_pr {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  XKind x_axis = XKind::SnrDb;
  std::string title;
  std::vector<PlotSeries> series;
  std::filesystem::path image_path;
  std::filesystem::path csv_path;
};

/// Smallest value drawn on the log axis; exact zeros are shown here.
inline constexpr double kPlotFloor = 1e-16;

/// One plot per x-axis kind present in `aggregates`, one series per algorithm, using `stat`.
std::vector<PlotSpec> plots_from_aggregates(const std::vector<AggregateRecord>& aggregates,
                                            Statistic stat = Statistic::Median);

/// Static SVG with a log10 y-axis.
std::string render_svg(const PlotSpec& spec);

}  // namespace robust_pr

#pragma once

// Minimal self-contained SVG line charts.

#include <optional>
#include <string>
#include <vector>

namespace assistfair {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<double> marker_x;  // dashed vertical line
  std::string marker_label;
};

std::string render_svg(const LineChart& chart);

/// Header `series,x,y`, one row per plotted point.
std::string chart_points_csv(const LineChart& chart);

}  // namespace assistfair

#pragma once

// Minimal static SVG line charts.

#include <optional>
#include <string>
#include <vector>

namespace uavbs {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<double> y_min;
  std::optional<double> y_max;
};

std::string render_svg(const LineChart& chart);

}  // namespace uavbs

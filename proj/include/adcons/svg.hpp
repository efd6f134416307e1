#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace adcons {

struct LineSeries {
  std::string label;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label = "t (s)";
  std::string y_label;
  std::vector<double> x;
  std::vector<LineSeries> series;
};

/// Polyline chart with axes, tick labels and a legend. Non-finite points are
/// dropped. Throws std::invalid_argument if a series length differs from x.
void write_svg(std::ostream& out, const LineChart& chart);
void write_svg(const std::filesystem::path& path, const LineChart& chart);

}  // namespace adcons

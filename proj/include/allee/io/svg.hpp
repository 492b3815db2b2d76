#pragma once

// Minimal SVG output: line plots and labeled rectangle maps on a fixed
// 800x600 viewBox.

#include <string>
#include <vector>

namespace allee::io {

struct Series {
  std::string name;
  std::vector<double> x, y;
  std::string color;  // empty picks from a fixed palette
};

struct Axes {
  std::string title, xlabel, ylabel;
};

/// One <path> per series, with axes, ticks and a legend.
std::string svg_lines(const Axes& axes, const std::vector<Series>& series);

struct Rect {
  double x0, x1, y0, y1;
  std::string label;  // legend key; equal labels share a color
};

/// Rectangles colored by label, with a legend in first-seen label order.
std::string svg_rect_map(const Axes& axes, const std::vector<Rect>& rects,
                         const std::vector<std::pair<std::string, std::string>>& colors);

}  // namespace allee::io

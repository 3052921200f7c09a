#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pars::svg {

// One plotted line. Points with non-finite coordinates split the line
// into separate strokes rather than being drawn.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;     // css color; empty picks from the default palette
  bool dashed = false;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

// Panels stack vertically and share the chart width. Every series is
// emitted as one <path class="series"> so plot layout is checkable by
// counting paths.
struct Chart {
  std::string title;
  std::vector<Panel> panels;
  int width = 860;
  int panel_height = 240;
};

std::string render(const Chart& chart);

void write_chart(const std::filesystem::path& path, const Chart& chart);

}  // namespace pars::svg

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <utility>

#include "pars/errors.hpp"
#include "pars/svg.hpp"

using namespace pars;

namespace {

size_t count_occurrences(const std::string& text, const std::string& needle) {
  size_t count = 0;
  for (size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

svg::Series ramp(const std::string& label, double slope) {
  svg::Series s;
  s.label = label;
  for (int i = 0; i <= 20; ++i) {
    s.x.push_back(i * 0.5);
    s.y.push_back(slope * i);
  }
  return s;
}

// First "M x,y" coordinate pair of the n-th series path.
std::pair<double, double> first_point(const std::string& doc, size_t nth) {
  size_t pos = 0;
  for (size_t i = 0; i <= nth; ++i) {
    pos = doc.find("class=\"series\"", pos) + 1;
    REQUIRE(pos != std::string::npos);
  }
  const size_t m = doc.find("d=\"M", pos);
  REQUIRE(m != std::string::npos);
  double x = 0.0, y = 0.0;
  REQUIRE(std::sscanf(doc.c_str() + m + 4, "%lf,%lf", &x, &y) == 2);
  return {x, y};
}

}  // namespace

TEST_CASE("svg: compare-style chart holds exactly six series paths") {
  svg::Chart chart;
  chart.title = "case 1";
  for (const char* name : {"bank angle", "flight path angle", "load factor"}) {
    svg::Panel panel;
    panel.title = name;
    panel.x_label = "time [s]";
    panel.y_label = name;
    panel.series = {ramp("rl", 1.0), ramp("pid", -1.0)};
    chart.panels.push_back(panel);
  }
  const std::string doc = svg::render(chart);
  CHECK(doc.find("<svg") == 0);
  CHECK(doc.rfind("</svg>") != std::string::npos);
  CHECK(count_occurrences(doc, "class=\"series\"") == 6);
  CHECK(count_occurrences(doc, ">rl</text>") == 3);
  CHECK(count_occurrences(doc, ">pid</text>") == 3);
  CHECK(doc.find("nan") == std::string::npos);
  CHECK(doc.find("inf") == std::string::npos);
}

TEST_CASE("svg: non-finite points split a series into separate strokes") {
  svg::Series s = ramp("gappy", 1.0);
  s.y[10] = std::numeric_limits<double>::quiet_NaN();
  svg::Chart chart;
  chart.panels.push_back({"p", "x", "y", {s}});
  const std::string doc = svg::render(chart);
  CHECK(count_occurrences(doc, "class=\"series\"") == 1);

  const size_t d_start = doc.find("d=\"M");
  const size_t d_end = doc.find('"', d_start + 3);
  const std::string path = doc.substr(d_start, d_end - d_start);
  CHECK(count_occurrences(path, "M") == 2);
  CHECK(doc.find("nan") == std::string::npos);
}

TEST_CASE("svg: y axis points up") {
  svg::Panel panel;
  panel.series.push_back({"low", {0.0, 1.0}, {0.0, 0.0}, "", false});
  panel.series.push_back({"high", {0.0, 1.0}, {10.0, 10.0}, "", false});
  svg::Chart chart;
  chart.panels.push_back(panel);
  const std::string doc = svg::render(chart);
  const auto low = first_point(doc, 0);
  const auto high = first_point(doc, 1);
  CHECK(low.first == high.first);
  CHECK(high.second < low.second);   // screen y grows downward
}

TEST_CASE("svg: constant series and empty markup survive") {
  svg::Panel panel;
  panel.series.push_back({"flat", {0.0, 1.0, 2.0}, {5.0, 5.0, 5.0}, "", false});
  panel.series.push_back({"empty", {}, {}, "", true});
  svg::Chart chart;
  chart.panels.push_back(panel);
  const std::string doc = svg::render(chart);
  CHECK(count_occurrences(doc, "class=\"series\"") == 2);
  CHECK(doc.find("nan") == std::string::npos);
  CHECK(doc.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("svg: labels are xml escaped") {
  svg::Panel panel;
  panel.title = "a < b & c";
  panel.series.push_back(ramp("\"q\"", 1.0));
  svg::Chart chart;
  chart.panels.push_back(panel);
  const std::string doc = svg::render(chart);
  CHECK(doc.find("a &lt; b &amp; c") != std::string::npos);
  CHECK(doc.find("data-label=\"&quot;q&quot;\"") != std::string::npos);
}

TEST_CASE("svg: write_chart writes the rendered document") {
  const auto path = std::filesystem::temp_directory_path() / "pars_test_chart.svg";
  std::filesystem::remove(path);
  svg::Chart chart;
  chart.panels.push_back({"p", "x", "y", {ramp("r", 2.0)}});
  svg::write_chart(path, chart);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string doc((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(doc == svg::render(chart));
  std::filesystem::remove(path);
}

#include "pars/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "pars/errors.hpp"

namespace pars::svg {

namespace {

constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 34.0;
constexpr double kMarginBottom = 46.0;
constexpr double kTitleHeight = 34.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#ff7f0e", "#9467bd", "#8c564b"};
constexpr size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
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
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct Extent {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Always yields a non-degenerate interval.
  void finalize() {
    if (lo > hi) {
      lo = 0.0;
      hi = 1.0;
    } else if (lo == hi) {
      lo -= 1.0;
      hi += 1.0;
    }
  }
  double span() const { return hi - lo; }
};

double nice_step(double span, int target_ticks) {
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  const double mult = r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0;
  return mult * mag;
}

std::vector<double> ticks(const Extent& e, int target) {
  const double step = nice_step(e.span(), target);
  std::vector<double> out;
  double t = std::ceil(e.lo / step) * step;
  for (; t <= e.hi + step * 1e-9; t += step) {
    out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  }
  return out;
}

void render_panel(std::ostringstream& out, const Panel& panel, double top,
                  double width, double height) {
  const double x0 = kMarginLeft;
  const double x1 = width - kMarginRight;
  const double y0 = top + kMarginTop;
  const double y1 = top + height - kMarginBottom;

  Extent ex, ey;
  for (const auto& s : panel.series) {
    for (double v : s.x) ex.add(v);
    for (double v : s.y) ey.add(v);
  }
  ex.finalize();
  ey.finalize();

  const auto px = [&](double v) { return x0 + (v - ex.lo) / ex.span() * (x1 - x0); };
  const auto py = [&](double v) { return y1 - (v - ey.lo) / ey.span() * (y1 - y0); };

  out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(top + 20)
      << "\" text-anchor=\"middle\" class=\"panel-title\">" << escape(panel.title)
      << "</text>\n";

  for (double t : ticks(ex, 6)) {
    const double x = px(t);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(y1) << "\" class=\"grid\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(y1 + 18)
        << "\" text-anchor=\"middle\" class=\"tick\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(ey, 5)) {
    const double y = py(t);
    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x1)
        << "\" y2=\"" << num(y) << "\" class=\"grid\"/>\n";
    out << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" class=\"tick\">" << tick_label(t) << "</text>\n";
  }

  out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\""
      << num(x1 - x0) << "\" height=\"" << num(y1 - y0) << "\" class=\"frame\"/>\n";
  out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(y1 + 36)
      << "\" text-anchor=\"middle\" class=\"axis-label\">" << escape(panel.x_label)
      << "</text>\n";
  out << "<text x=\"" << num(x0 - 48) << "\" y=\"" << num((y0 + y1) / 2)
      << "\" text-anchor=\"middle\" class=\"axis-label\" transform=\"rotate(-90 "
      << num(x0 - 48) << " " << num((y0 + y1) / 2) << ")\">" << escape(panel.y_label)
      << "</text>\n";

  for (size_t i = 0; i < panel.series.size(); ++i) {
    const Series& s = panel.series[i];
    const std::string color = s.color.empty() ? kPalette[i % kPaletteSize] : s.color;
    std::string d;
    bool pen_down = false;
    const size_t n = std::min(s.x.size(), s.y.size());
    for (size_t k = 0; k < n; ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) {
        pen_down = false;
        continue;
      }
      d += pen_down ? "L" : "M";
      d += num(px(s.x[k])) + "," + num(py(s.y[k])) + " ";
      pen_down = true;
    }
    out << "<path class=\"series\" data-label=\"" << escape(s.label) << "\" d=\"" << d
        << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << "/>\n";

    const double ly = y0 + 16 + 18 * static_cast<double>(i);
    const double lx = x1 - 150;
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
        << num(lx + 22) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.6\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << "/>\n";
    out << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly)
        << "\" class=\"legend\">" << escape(s.label) << "</text>\n";
  }
}

}  // namespace

std::string render(const Chart& chart) {
  const double title_h = chart.title.empty() ? 0.0 : kTitleHeight;
  const double height =
      title_h + static_cast<double>(chart.panel_height) *
                    static_cast<double>(std::max<size_t>(chart.panels.size(), 1));

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width
      << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << chart.width << " "
      << num(height) << "\">\n";
  out << "<style>\n"
         "text { font-family: sans-serif; fill: #222; }\n"
         ".panel-title { font-size: 14px; font-weight: bold; }\n"
         ".axis-label { font-size: 12px; }\n"
         ".tick, .legend { font-size: 11px; }\n"
         ".grid { stroke: #ddd; stroke-width: 0.7; }\n"
         ".frame { fill: none; stroke: #444; stroke-width: 1; }\n"
         "</style>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!chart.title.empty()) {
    out << "<text x=\"" << chart.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
           "style=\"font-size:16px;font-weight:bold\">"
        << escape(chart.title) << "</text>\n";
  }
  for (size_t p = 0; p < chart.panels.size(); ++p) {
    render_panel(out, chart.panels[p],
                 title_h + static_cast<double>(chart.panel_height) * static_cast<double>(p),
                 chart.width, chart.panel_height);
  }
  out << "</svg>\n";
  return out.str();
}

void write_chart(const std::filesystem::path& path, const Chart& chart) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write plot: " + path.string());
  out << render(chart);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace pars::svg

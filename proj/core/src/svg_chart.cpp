#include "ideaforge/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ideaforge/error.hpp"

namespace ideaforge::report {

namespace {

constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;  // room for the legend
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void require_finite(double v) {
  if (!std::isfinite(v)) throw DataError("chart value is not finite");
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kChartWidth - kLeft - kRight); }
  double py(double y) const { return kChartHeight - kBottom - (y - y0) / (y1 - y0) * (kChartHeight - kTop - kBottom); }
};

void pad(double& lo, double& hi) {
  if (hi - lo <= 0.0) {
    const double d = lo == 0.0 ? 0.5 : std::fabs(lo) * 0.05;
    lo -= d;
    hi += d;
  }
}

std::string header(const ChartSpec& spec) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kChartWidth) + "\" height=\"" + num(kChartHeight) +
       "\" viewBox=\"0 0 " + num(kChartWidth) + " " + num(kChartHeight) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(kChartWidth) + "\" height=\"" + num(kChartHeight) + "\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kChartWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
       escape(spec.title) + "</text>\n";
  return s;
}

// Integer ticks between lo and hi, at most twelve of them.
std::vector<double> integer_ticks(double lo, double hi) {
  const double first = std::ceil(lo), last = std::floor(hi);
  std::vector<double> out;
  if (last < first) return out;
  const double step = std::max(1.0, std::ceil((last - first + 1.0) / 12.0));
  for (double v = first; v <= last; v += step) out.push_back(v);
  return out;
}

std::string axes(const Frame& f, const ChartSpec& spec, const std::vector<double>& xticks, bool y_ticks) {
  const double bx = kChartHeight - kBottom, lx = kLeft, rx = kChartWidth - kRight;
  std::string s = "<g font-family=\"sans-serif\" font-size=\"11\" stroke=\"black\">\n";
  s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(bx) + "\" x2=\"" + num(rx) + "\" y2=\"" + num(bx) + "\"/>\n";
  s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(lx) + "\" y2=\"" + num(bx) + "\"/>\n";
  for (double t : xticks) {
    const double x = f.px(t);
    s += "<line x1=\"" + num(x) + "\" y1=\"" + num(bx) + "\" x2=\"" + num(x) + "\" y2=\"" + num(bx + 5) + "\"/>\n";
    s += "<text x=\"" + num(x) + "\" y=\"" + num(bx + 18) + "\" text-anchor=\"middle\" stroke=\"none\">" + tick_label(t) +
         "</text>\n";
  }
  if (y_ticks) {
    for (int i = 0; i <= 4; ++i) {
      const double v = f.y0 + (f.y1 - f.y0) * i / 4.0;
      const double y = f.py(v);
      s += "<line x1=\"" + num(lx - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(lx) + "\" y2=\"" + num(y) + "\"/>\n";
      s += "<text x=\"" + num(lx - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\" stroke=\"none\">" + tick_label(v) +
           "</text>\n";
    }
  }
  s += "<text x=\"" + num((lx + rx) / 2) + "\" y=\"" + num(kChartHeight - 10) + "\" text-anchor=\"middle\" stroke=\"none\">" +
       escape(spec.x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"" + num((kTop + bx) / 2) + "\" text-anchor=\"middle\" stroke=\"none\" transform=\"rotate(-90 16 " +
       num((kTop + bx) / 2) + ")\">" + escape(spec.y_label) + "</text>\n";
  s += "</g>\n";
  return s;
}

std::string line_chart(const ChartSpec& spec) {
  if (spec.series.empty()) throw DataError("chart has no series");
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : spec.series) {
    if (s.points.empty()) throw DataError("chart series '" + s.label + "' is empty");
    for (const auto& [x, y] : s.points) {
      require_finite(x);
      require_finite(y);
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (spec.marker_x) {
    require_finite(*spec.marker_x);
    x0 = std::min(x0, *spec.marker_x);
    x1 = std::max(x1, *spec.marker_x);
  }
  pad(x0, x1);
  pad(y0, y1);
  const Frame f{x0, x1, y0, y1};
  std::string out = header(spec) + axes(f, spec, integer_ticks(x0, x1), true);
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const auto& s = spec.series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < s.points.size(); ++j) {
      if (j) out += ' ';
      out += num(f.px(s.points[j].first)) + "," + num(f.py(s.points[j].second));
    }
    out += "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(i);
    const double lx = kChartWidth - kRight + 12.0;
    out += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 8) + "\" width=\"12\" height=\"8\" fill=\"" + color + "\"/>\n";
    out += "<text x=\"" + num(lx + 18) + "\" y=\"" + num(ly) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
           escape(s.label) + "</text>\n";
  }
  if (spec.marker_x) {
    const double x = f.px(*spec.marker_x);
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(x) + "\" y2=\"" +
           num(kChartHeight - kBottom) + "\" stroke=\"#555555\" stroke-dasharray=\"4 3\"/>\n";
    out += "<text x=\"" + num(x + 4) + "\" y=\"" + num(kTop + 10) +
           "\" font-family=\"sans-serif\" font-size=\"11\">selected " + tick_label(*spec.marker_x) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string burst_timeline(const ChartSpec& spec) {
  if (spec.bars.empty()) throw DataError("burst timeline has no bars");
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, wmax = 0.0;
  for (const auto& b : spec.bars) {
    require_finite(b.start);
    require_finite(b.end);
    require_finite(b.weight);
    if (b.end < b.start) throw DataError("burst bar '" + b.label + "' ends before it starts");
    x0 = std::min(x0, b.start);
    x1 = std::max(x1, b.end + 1.0);
    wmax = std::max(wmax, b.weight);
  }
  if (spec.x_range) {
    require_finite(spec.x_range->first);
    require_finite(spec.x_range->second);
    x0 = std::min(x0, spec.x_range->first);
    x1 = std::max(x1, spec.x_range->second + 1.0);
  }
  pad(x0, x1);
  const Frame f{x0, x1, 0.0, 1.0};
  std::string out = header(spec) + axes(f, spec, integer_ticks(x0, x1 - 1.0), false);
  const double row_h = std::min(20.0, (kChartHeight - kTop - kBottom) / static_cast<double>(spec.bars.size()));
  for (std::size_t i = 0; i < spec.bars.size(); ++i) {
    const auto& b = spec.bars[i];
    const double y = kTop + row_h * static_cast<double>(i);
    const double opacity = wmax > 0.0 ? 0.35 + 0.65 * b.weight / wmax : 1.0;
    const double bx = f.px(b.start), bw = f.px(b.end + 1.0) - bx;
    out += "<rect x=\"" + num(bx) + "\" y=\"" + num(y + 2) + "\" width=\"" + num(bw) + "\" height=\"" +
           num(std::max(2.0, row_h - 4)) + "\" fill=\"#d62728\" fill-opacity=\"" + num(opacity) + "\"/>\n";
    out += "<text x=\"" + num(kChartWidth - kRight + 8) + "\" y=\"" + num(y + row_h / 2 + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(b.label) + " (" + tick_label(b.weight) +
           ")</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace

std::string render_svg_chart(const ChartSpec& spec) {
  return spec.kind == ChartKind::kBurstTimeline ? burst_timeline(spec) : line_chart(spec);
}

}  // namespace ideaforge::report

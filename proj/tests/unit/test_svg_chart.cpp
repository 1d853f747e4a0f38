#include <gtest/gtest.h>

#include <cmath>
#include <regex>
#include <sstream>
#include <vector>

#include "ideaforge/error.hpp"
#include "ideaforge/svg_chart.hpp"

namespace {

using namespace ideaforge;
using namespace ideaforge::report;

// Minimal well-formedness check: balanced element nesting, quoted attributes.
bool well_formed(const std::string& s, std::string& why) {
  std::vector<std::string> stack;
  std::size_t i = s.find("<svg");
  if (i == std::string::npos) {
    why = "no svg root";
    return false;
  }
  while ((i = s.find('<', i)) != std::string::npos) {
    const auto close = s.find('>', i);
    if (close == std::string::npos) {
      why = "unterminated tag";
      return false;
    }
    std::string tag = s.substr(i + 1, close - i - 1);
    i = close + 1;
    if (tag.empty()) {
      why = "empty tag";
      return false;
    }
    if (tag[0] == '!' || tag[0] == '?') continue;
    std::size_t quotes = 0;
    for (char c : tag) quotes += c == '"';
    if (quotes % 2) {
      why = "unbalanced quotes in <" + tag + ">";
      return false;
    }
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) {
        why = "mismatched </" + tag.substr(1) + ">";
        return false;
      }
      stack.pop_back();
    } else if (tag.back() != '/') {
      stack.push_back(tag.substr(0, tag.find_first_of(" \n\t")));
    }
  }
  if (!stack.empty()) why = "unclosed <" + stack.back() + ">";
  return stack.empty();
}

// Every x/y/cx/cy coordinate and polyline point inside the viewBox.
void expect_in_bounds(const std::string& svg) {
  const std::regex attr("\\b(x|y|cx|cy|x1|x2|y1|y2)=\"(-?[0-9.e+-]+)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), attr); it != std::sregex_iterator(); ++it) {
    const double v = std::stod((*it)[2]);
    const double limit = (*it)[1].str()[0] == 'x' || (*it)[1].str() == "cx" ? kChartWidth : kChartHeight;
    EXPECT_GE(v, 0.0) << (*it)[0];
    EXPECT_LE(v, limit) << (*it)[0];
  }
  const std::regex pts("points=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), pts); it != std::sregex_iterator(); ++it) {
    std::string list = (*it)[1];
    for (auto& c : list) c = c == ',' ? ' ' : c;
    std::istringstream in(list);
    double x, y;
    while (in >> x >> y) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, kChartWidth);
      EXPECT_GE(y, 0.0);
      EXPECT_LE(y, kChartHeight);
    }
  }
}

TEST(SvgChart, TrajectoryIsWellFormedAndBounded) {
  ChartSpec spec;
  spec.title = "topic-0 <trend> & more";
  spec.x_label = "year";
  spec.y_label = "probability";
  spec.series = {{"lidar", {{2010, 0.01}, {2011, 0.03}, {2012, 0.2}}}, {"radar", {{2010, 0.1}, {2011, 0.1}, {2012, 0.1}}}};
  const auto svg = render_svg_chart(spec);
  std::string why;
  EXPECT_TRUE(well_formed(svg, why)) << why;
  EXPECT_NE(svg.find("viewBox=\"0 0 720.00 420.00\""), std::string::npos);
  EXPECT_NE(svg.find("&lt;trend&gt; &amp; more"), std::string::npos);
  expect_in_bounds(svg);
  EXPECT_EQ(svg, render_svg_chart(spec));
}

TEST(SvgChart, SweepCurveAndSinglePoint) {
  ChartSpec spec;
  spec.kind = ChartKind::kSweepCurve;
  spec.series = {{"coherence", {{3, -102.8}, {4, -38.4}, {5, -5.98}}}};
  spec.marker_x = 5;
  std::string why;
  auto svg = render_svg_chart(spec);
  EXPECT_TRUE(well_formed(svg, why)) << why;
  expect_in_bounds(svg);
  spec.series = {{"one", {{7, 1.0}}}};
  svg = render_svg_chart(spec);
  EXPECT_TRUE(well_formed(svg, why)) << why;
  expect_in_bounds(svg);
}

TEST(SvgChart, BurstTimeline) {
  ChartSpec spec;
  spec.kind = ChartKind::kBurstTimeline;
  spec.bars = {{"v2x", 2018, 2019, 3.0}, {"old", 2011, 2013, 9.0}};
  spec.x_range = std::make_pair(2010.0, 2019.0);
  std::string why;
  const auto svg = render_svg_chart(spec);
  EXPECT_TRUE(well_formed(svg, why)) << why;
  expect_in_bounds(svg);
}

TEST(SvgChart, Errors) {
  ChartSpec spec;
  EXPECT_THROW(render_svg_chart(spec), DataError);
  spec.series = {{"empty", {}}};
  EXPECT_THROW(render_svg_chart(spec), DataError);
  spec.series = {{"nan", {{1, NAN}}}};
  EXPECT_THROW(render_svg_chart(spec), DataError);
  ChartSpec bars;
  bars.kind = ChartKind::kBurstTimeline;
  EXPECT_THROW(render_svg_chart(bars), DataError);
  bars.bars = {{"x", 2015, 2012, 1.0}};
  EXPECT_THROW(render_svg_chart(bars), DataError);
}

}  // namespace

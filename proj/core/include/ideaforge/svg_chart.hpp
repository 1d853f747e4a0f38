#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ideaforge::report {

enum class ChartKind { kTrajectory, kSweepCurve, kBurstTimeline };

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

struct ChartBar {
  std::string label;
  double start = 0.0;
  double end = 0.0;
  double weight = 0.0;
};

struct ChartSpec {
  ChartKind kind = ChartKind::kTrajectory;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartSeries> series;       // trajectory, sweep_curve
  std::optional<double> marker_x;        // sweep_curve: selected K
  std::vector<ChartBar> bars;            // burst_timeline, drawn top to bottom
  std::optional<std::pair<double, double>> x_range;  // burst_timeline axis
};

inline constexpr double kChartWidth = 720.0;
inline constexpr double kChartHeight = 420.0;

// Self-contained SVG document. Throws DataError when there is nothing to draw
// or a value is not finite.
std::string render_svg_chart(const ChartSpec& spec);

}  // namespace ideaforge::report

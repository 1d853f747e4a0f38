#pragma once

#include <string>
#include <vector>

namespace ideaforge::trendlab {

struct TimePoint {
  int year = 0;
  double value = 0.0;
  bool flagged = false;  // e.g. value came from an empty slice
};

struct TimeSeries {
  std::string label;
  std::vector<TimePoint> points;
  bool probability = false;  // values are probabilities; forecasts get clamped

  std::size_t size() const noexcept { return points.size(); }
  // Throws DataError unless years are strictly increasing and values finite.
  void validate() const;
};

inline constexpr int kMinObservations = 4;

struct TrendFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;  // two-sided
  int n = 0;
  int df = 0;
  double sigma2 = 0.0;  // residual variance SSE / (n - 2)
  bool probability_series = false;
};

// Least-squares line y = intercept + slope * year with a Student-t slope test.
// Throws DataError for fewer than four observations or constant years.
TrendFit ols_fit(const TimeSeries& series);

// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz).
double regularized_incomplete_beta(double a, double b, double x);

// Upper tail P(T > t_abs) of Student's t with df degrees of freedom.
double student_t_sf(double t_abs, double df);

// P(|T| > |t|). Infinite t gives 0.
double two_sided_p(double t, double df);

struct CorrelationResult {
  double r = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  int n = 0;
};

// Pearson correlation of two series on identical year sets (n >= 4).
CorrelationResult pearson(const TimeSeries& a, const TimeSeries& b);

struct ForecastPoint {
  int year = 0;
  double value = 0.0;
  bool clamped = false;
};

std::vector<ForecastPoint> forecast(const TrendFit& fit, const std::vector<int>& years);

}  // namespace ideaforge::trendlab

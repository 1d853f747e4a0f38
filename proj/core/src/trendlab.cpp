#include "ideaforge/trendlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ideaforge/error.hpp"

namespace ideaforge::trendlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Values this close to +-1 come from exactly collinear data.
double snap_unit(double v) {
  if (v > 1.0 - 4 * kEps) return 1.0;
  if (v < -1.0 + 4 * kEps) return -1.0;
  return v;
}

struct Moments {
  double mean_x = 0.0, mean_y = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
};

Moments moments(const std::vector<double>& x, const std::vector<double>& y) {
  Moments m;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    m.mean_x += x[i];
    m.mean_y += y[i];
  }
  m.mean_x /= n;
  m.mean_y /= n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - m.mean_x, dy = y[i] - m.mean_y;
    m.sxx += dx * dx;
    m.sxy += dx * dy;
    m.syy += dy * dy;
  }
  return m;
}

}  // namespace

void TimeSeries::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].value)) throw DataError("series '" + label + "' has a non-finite value");
    if (i > 0 && points[i].year <= points[i - 1].year) {
      throw DataError("series '" + label + "' years are not strictly increasing");
    }
  }
}

TrendFit ols_fit(const TimeSeries& series) {
  series.validate();
  const int n = static_cast<int>(series.size());
  if (n < kMinObservations) {
    throw DataError("series '" + series.label + "': insufficient observations (at least " +
                    std::to_string(kMinObservations) + " required, got " + std::to_string(n) + ")");
  }
  std::vector<double> x, y;
  for (const auto& p : series.points) {
    x.push_back(static_cast<double>(p.year));
    y.push_back(p.value);
  }
  const Moments m = moments(x, y);
  if (m.sxx == 0.0) throw DataError("series '" + series.label + "': zero variance in years");

  TrendFit fit;
  fit.n = n;
  fit.df = n - 2;
  fit.probability_series = series.probability;
  fit.slope = m.sxy / m.sxx;
  fit.intercept = m.mean_y - fit.slope * m.mean_x;
  fit.r_squared = m.syy == 0.0 ? 0.0 : std::clamp(snap_unit(m.sxy * m.sxy / (m.sxx * m.syy)), 0.0, 1.0);
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (m.mean_y + fit.slope * (x[i] - m.mean_x));
    sse += r * r;
  }
  fit.sigma2 = sse / fit.df;
  if (fit.slope == 0.0) {
    fit.t_stat = 0.0;
  } else if (fit.sigma2 == 0.0) {
    fit.t_stat = std::copysign(std::numeric_limits<double>::infinity(), fit.slope);
  } else {
    fit.t_stat = fit.slope / std::sqrt(fit.sigma2 / m.sxx);
  }
  fit.p_value = two_sided_p(fit.t_stat, fit.df);
  return fit;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw InternalError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InternalError("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);

  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  constexpr double kTiny = 1e-300;
  constexpr double kTol = 1e-15;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double f = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    f *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::fabs(delta - 1.0) < kTol) return std::exp(log_front) * f / a;
  }
  throw InternalError("incomplete beta continued fraction did not converge");
}

double student_t_sf(double t_abs, double df) {
  if (!(df >= 1.0)) throw InternalError("student t needs df >= 1");
  if (std::isnan(t_abs)) throw InternalError("student t statistic is NaN");
  t_abs = std::fabs(t_abs);
  if (std::isinf(t_abs)) return 0.0;
  if (t_abs == 0.0) return 0.5;
  const double x = df / (df + t_abs * t_abs);
  return 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x);
}

double two_sided_p(double t, double df) { return std::min(1.0, 2.0 * student_t_sf(std::fabs(t), df)); }

CorrelationResult pearson(const TimeSeries& a, const TimeSeries& b) {
  a.validate();
  b.validate();
  std::string mismatch;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    const bool ha = i < a.size(), hb = i < b.size();
    if (ha && hb && a.points[i].year == b.points[i].year) continue;
    if (!mismatch.empty()) mismatch += ", ";
    mismatch += "position " + std::to_string(i) + ": " + (ha ? std::to_string(a.points[i].year) : "none") + " vs " +
                (hb ? std::to_string(b.points[i].year) : "none");
  }
  if (!mismatch.empty()) {
    throw DataError("series '" + a.label + "' and '" + b.label + "' are not aligned (" + mismatch + ")");
  }
  const int n = static_cast<int>(a.size());
  if (n < kMinObservations) {
    throw DataError("correlation of '" + a.label + "' and '" + b.label + "': insufficient observations (at least " +
                    std::to_string(kMinObservations) + " required, got " + std::to_string(n) + ")");
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < a.size(); ++i) {
    x.push_back(a.points[i].value);
    y.push_back(b.points[i].value);
  }
  const Moments m = moments(x, y);
  if (m.sxx == 0.0 || m.syy == 0.0) {
    throw DataError("undefined correlation: zero variance in '" + (m.sxx == 0.0 ? a.label : b.label) + "'");
  }
  CorrelationResult out;
  out.n = n;
  out.r = std::clamp(snap_unit(m.sxy / std::sqrt(m.sxx * m.syy)), -1.0, 1.0);
  if (std::fabs(out.r) == 1.0) {
    out.t_stat = std::copysign(std::numeric_limits<double>::infinity(), out.r);
    out.p_value = 0.0;
  } else {
    out.t_stat = out.r * std::sqrt((n - 2) / (1.0 - out.r * out.r));
    out.p_value = two_sided_p(out.t_stat, n - 2);
  }
  return out;
}

std::vector<ForecastPoint> forecast(const TrendFit& fit, const std::vector<int>& years) {
  std::vector<ForecastPoint> out;
  out.reserve(years.size());
  for (int year : years) {
    ForecastPoint p{year, fit.intercept + fit.slope * static_cast<double>(year), false};
    if (fit.probability_series && (p.value < 0.0 || p.value > 1.0)) {
      p.value = std::clamp(p.value, 0.0, 1.0);
      p.clamped = true;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace ideaforge::trendlab

#include "geostat/metrics.hpp"

#include <cmath>
#include <limits>

#include "geostat/errors.hpp"

namespace geostat {

RegressionMetrics regression_metrics(std::span<const double> predictions,
                                     std::span<const double> observations) {
  if (predictions.empty() || predictions.size() != observations.size())
    throw LengthMismatch("predictions and observations must have equal, non-zero length");
  const double n = static_cast<double>(observations.size());
  double mean = 0.0;
  for (double y : observations) mean += y / n;

  double ss_res = 0.0, ss_tot = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const double r = predictions[i] - observations[i];
    ss_res += r * r;
    abs_sum += std::abs(r);
    ss_tot += (observations[i] - mean) * (observations[i] - mean);
  }

  RegressionMetrics m;
  m.rmse = std::sqrt(ss_res / n);
  m.mae = abs_sum / n;
  if (ss_tot > 0.0) {
    m.r2 = 1.0 - ss_res / ss_tot;
  } else {
    m.r2_degenerate = true;
    m.r2 = ss_res == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

double interval_score(double lower, double upper, double y, double alpha, double width_floor) {
  if (lower > upper) throw InvalidBounds("interval lower bound exceeds upper bound");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  double penalty = 0.0;
  if (y < lower) penalty = lower - y;
  if (y > upper) penalty = y - upper;
  return std::max(upper - lower, width_floor) + (2.0 / alpha) * penalty;
}

IntervalMetrics interval_metrics(std::span<const PredictionInterval> intervals,
                                 std::span<const double> observations, double alpha) {
  if (intervals.empty() || intervals.size() != observations.size())
    throw LengthMismatch("intervals and observations must have equal, non-zero length");
  const double n = static_cast<double>(intervals.size());
  IntervalMetrics m;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    m.mean_interval_score += interval_score(iv.lower, iv.upper, observations[i], alpha);
    m.mean_interval_size += iv.upper - iv.lower;
    if (observations[i] >= iv.lower && observations[i] <= iv.upper) ++covered;
  }
  m.mean_interval_score /= n;
  m.mean_interval_size /= n;
  m.empirical_coverage = static_cast<double>(covered) / n;
  m.coverage_deviation = std::abs(m.empirical_coverage - (1.0 - alpha));
  return m;
}

}  // namespace geostat

#pragma once

#include <span>

#include "geostat/geocp.hpp"

namespace geostat {

struct RegressionMetrics {
  double rmse = 0.0;
  double mae = 0.0;
  double r2 = 0.0;
  // Observations have zero variance. r2 is then 0 for a perfect fit and NaN
  // otherwise.
  bool r2_degenerate = false;
};

// Throws LengthMismatch for empty or unequal inputs.
RegressionMetrics regression_metrics(std::span<const double> predictions,
                                     std::span<const double> observations);

// max(U - L, width_floor) + (2 / alpha) * (distance of y outside [L, U]).
// Throws InvalidBounds when L > U.
double interval_score(double lower, double upper, double y, double alpha,
                      double width_floor = 1e-6);

struct IntervalMetrics {
  double mean_interval_score = 0.0;
  double mean_interval_size = 0.0;
  double empirical_coverage = 0.0;
  double coverage_deviation = 0.0;  // |coverage - (1 - alpha)|
};

IntervalMetrics interval_metrics(std::span<const PredictionInterval> intervals,
                                 std::span<const double> observations, double alpha);

}  // namespace geostat

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "geostat/spatial.hpp"

namespace geostat {

inline double nonconformity_abs(double prediction, double observation) {
  return std::abs(prediction - observation);
}

// Calibration locations with their nonconformity scores.
struct CalibrationScores {
  std::vector<Point2> coords;
  std::vector<double> scores;

  // Throws when empty, mismatched, or a score is negative or non-finite.
  void validate() const;
  std::size_t size() const noexcept { return scores.size(); }
};

struct BandwidthSearch {
  std::size_t n_starts = 8;
  double sigma_min = 0.01;
  double sigma_max = 2.0;
  double holdout_frac = 0.2;
  std::uint64_t seed = 0;
  // Lower clip: sigma is raised until the median effective sample size of
  // the holdout weights reaches this count. 0 disables the clip.
  double min_effective_n = 30.0;

  friend bool operator==(const BandwidthSearch&, const BandwidthSearch&) = default;
};

// exp(-d^2 / 2) with no normalisation.
struct FixedLegacyKernel {
  friend bool operator==(const FixedLegacyKernel&, const FixedLegacyKernel&) = default;
};
// Every calibration point weighted 1; the quantile step normalises, which
// keeps cumulative sums exact (k / m).
struct UniformKernel {
  friend bool operator==(const UniformKernel&, const UniformKernel&) = default;
};
struct FixedSigmaKernel {
  double sigma = 1.0;
  friend bool operator==(const FixedSigmaKernel&, const FixedSigmaKernel&) = default;
};
// Per-test bandwidth from the distance to the k-th nearest calibration point,
// optionally floored at half the standard deviation of the test point's
// distance row, then clipped to [clip_lo, clip_hi].
struct KnnAdaptiveKernel {
  std::size_t k = 10;
  double clip_lo = 0.05;
  double clip_hi = 0.5;
  bool dispersion_floor = false;
  friend bool operator==(const KnnAdaptiveKernel&, const KnnAdaptiveKernel&) = default;
};
// One global bandwidth chosen by optimize_bandwidth on the calibration set.
struct OptimizedSigmaKernel {
  BandwidthSearch search;
  friend bool operator==(const OptimizedSigmaKernel&, const OptimizedSigmaKernel&) = default;
};

using KernelPolicy = std::variant<FixedLegacyKernel, UniformKernel, FixedSigmaKernel,
                                  KnnAdaptiveKernel, OptimizedSigmaKernel>;

std::string_view kernel_name(const KernelPolicy& policy);

struct GeoWeights {
  std::vector<double> weights;
  bool degenerate = false;  // all raw weights underflowed; uniform weights substituted
};

// Kernel weights of every calibration point for one test location. All
// policies except FixedLegacy and Uniform normalise to unit sum. OptimizedSigma must be
// resolved to a FixedSigma bandwidth first.
GeoWeights geo_weights(const Point2& test, std::span<const Point2> calib,
                       const KernelPolicy& policy);

enum class QuantileMethod { Stepwise, Interpolated };
enum class LevelRule { Ceiling, NoCeiling };

std::string_view to_string(QuantileMethod method);
std::string_view to_string(LevelRule rule);
QuantileMethod parse_quantile_method(std::string_view name);
LevelRule parse_level_rule(std::string_view name);

// ceil((1 - alpha)(n + 1)) / n or (1 - alpha)(n + 1) / n, capped at 1.
double quantile_level(std::size_t n, double alpha, LevelRule rule);

// Smallest score whose cumulative normalised weight (scores sorted
// ascending, ties in input order) reaches q.
double weighted_quantile_stepwise(std::span<const double> scores, std::span<const double> weights,
                                  double q);

// Piecewise-linear interpolation through (cumulative weight, sorted score).
double weighted_quantile_interpolated(std::span<const double> scores,
                                      std::span<const double> weights, double q);

double weighted_quantile(QuantileMethod method, std::span<const double> scores,
                         std::span<const double> weights, double q);

// Kish effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> weights);

struct HoldoutSplit {
  CalibrationScores fit;
  CalibrationScores holdout;
};

class Rng;

// Seeded shuffle of the calibration set; the first round(holdout_frac * m)
// rows (at least 1, at most m - 1) form the holdout.
HoldoutSplit split_holdout(const CalibrationScores& calib, double holdout_frac, Rng& rng);

// Multi-start search for the single Gaussian bandwidth minimising the mean
// interval score on a seeded holdout slice of the calibration set. The slice
// is split_holdout with an Rng seeded from search.seed. Needs at least 10
// calibration points.
double optimize_bandwidth(const CalibrationScores& calib, const BandwidthSearch& search,
                          double alpha, QuantileMethod method = QuantileMethod::Stepwise,
                          LevelRule rule = LevelRule::NoCeiling);

// Mean interval score of the holdout intervals for one bandwidth; the
// objective optimize_bandwidth minimises.
double bandwidth_objective(const CalibrationScores& fit, const CalibrationScores& holdout,
                           double sigma, double alpha, QuantileMethod method, LevelRule rule);

struct PredictionInterval {
  double lower = 0.0;
  double upper = 0.0;
  double threshold = 0.0;
  double center = 0.0;
};

struct GeoCPConfig {
  KernelPolicy kernel = FixedLegacyKernel{};
  QuantileMethod method = QuantileMethod::Stepwise;
  LevelRule level_rule = LevelRule::Ceiling;
  double alpha = 0.1;
};

struct GeoCPResult {
  std::vector<PredictionInterval> intervals;
  std::size_t degenerate_weights = 0;
  std::optional<double> sigma;  // chosen bandwidth for OptimizedSigma
};

// Zero-mean, unit-variance scaling per axis, fitted on one coordinate set.
class CoordinateScaler {
 public:
  explicit CoordinateScaler(std::span<const Point2> reference);
  Point2 operator()(const Point2& p) const;
  std::vector<Point2> apply(std::span<const Point2> pts) const;

 private:
  double mean_x_ = 0.0, mean_y_ = 0.0, scale_x_ = 1.0, scale_y_ = 1.0;
};

// Geographically weighted split conformal intervals around the test
// predictions. Coordinates are standardised on the calibration set first.
GeoCPResult run_geocp(std::span<const double> calib_predictions,
                      std::span<const double> calib_observations,
                      std::span<const Point2> calib_coords,
                      std::span<const double> test_predictions,
                      std::span<const Point2> test_coords, const GeoCPConfig& config);

// Mean target of the k nearest training rows in standardised feature space
// (exact search, ties by row index). Rows are observations, columns features.
std::vector<double> baseline_predict_knn(const Eigen::MatrixXd& train_features,
                                         std::span<const double> train_targets,
                                         const Eigen::MatrixXd& query_features, std::size_t k);

}  // namespace geostat

#include "geostat/geocp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "geostat/errors.hpp"
#include "geostat/metrics.hpp"
#include "geostat/parallel.hpp"
#include "geostat/random.hpp"

namespace geostat {

void CalibrationScores::validate() const {
  if (scores.empty()) throw InvalidArgument("calibration set is empty");
  if (coords.size() != scores.size())
    throw LengthMismatch("calibration coordinates and scores differ in length");
  for (double s : scores)
    if (!std::isfinite(s) || s < 0.0)
      throw InvalidArgument("calibration scores must be finite and non-negative");
}

std::string_view kernel_name(const KernelPolicy& policy) {
  struct Visitor {
    std::string_view operator()(const FixedLegacyKernel&) const { return "fixed_legacy"; }
    std::string_view operator()(const UniformKernel&) const { return "uniform"; }
    std::string_view operator()(const FixedSigmaKernel&) const { return "fixed_sigma"; }
    std::string_view operator()(const KnnAdaptiveKernel&) const { return "knn_adaptive"; }
    std::string_view operator()(const OptimizedSigmaKernel&) const { return "optimized_sigma"; }
  };
  return std::visit(Visitor{}, policy);
}

namespace {

double kth_smallest(std::vector<double> values, std::size_t k) {
  k = std::min(k, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end());
  return values[k - 1];
}

double sample_stdev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

void gaussian(std::vector<double>& w, std::span<const double> d, double sigma) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = d[i] / sigma;
    w[i] = std::exp(-0.5 * r * r);
  }
}

}  // namespace

GeoWeights geo_weights(const Point2& test, std::span<const Point2> calib,
                       const KernelPolicy& policy) {
  if (calib.empty()) throw InvalidArgument("geo weights need calibration points");
  const std::size_t m = calib.size();
  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i) d[i] = distance(test, calib[i]);

  GeoWeights out;
  out.weights.assign(m, 0.0);
  bool normalize = true;

  if (std::holds_alternative<FixedLegacyKernel>(policy)) {
    gaussian(out.weights, d, 1.0);
    normalize = false;
  } else if (std::holds_alternative<UniformKernel>(policy)) {
    out.weights.assign(m, 1.0);
    normalize = false;
  } else if (const auto* fixed = std::get_if<FixedSigmaKernel>(&policy)) {
    if (!(fixed->sigma > 0.0)) throw InvalidArgument("kernel bandwidth must be positive");
    gaussian(out.weights, d, fixed->sigma);
  } else if (const auto* knn = std::get_if<KnnAdaptiveKernel>(&policy)) {
    if (knn->k == 0 || !(knn->clip_lo > 0.0) || knn->clip_hi < knn->clip_lo)
      throw InvalidArgument("adaptive kernel needs k >= 1 and 0 < clip_lo <= clip_hi");
    double sigma = kth_smallest(d, knn->k);
    if (knn->dispersion_floor) sigma = std::max(sigma, 0.5 * sample_stdev(d));
    gaussian(out.weights, d, std::clamp(sigma, knn->clip_lo, knn->clip_hi));
  } else {
    throw InvalidArgument("optimized bandwidth must be resolved before computing weights");
  }

  const double total = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
  if (!(total > 0.0)) {
    out.weights.assign(m, 1.0 / static_cast<double>(m));
    out.degenerate = true;
    return out;
  }
  if (normalize)
    for (double& w : out.weights) w /= total;
  return out;
}

std::string_view to_string(QuantileMethod method) {
  return method == QuantileMethod::Stepwise ? "stepwise" : "interpolated";
}

std::string_view to_string(LevelRule rule) {
  return rule == LevelRule::Ceiling ? "ceiling" : "no_ceiling";
}

QuantileMethod parse_quantile_method(std::string_view name) {
  if (name == "stepwise") return QuantileMethod::Stepwise;
  if (name == "interpolated") return QuantileMethod::Interpolated;
  throw InvalidArgument("unknown quantile method '" + std::string(name) + "'");
}

LevelRule parse_level_rule(std::string_view name) {
  if (name == "ceiling") return LevelRule::Ceiling;
  if (name == "no_ceiling") return LevelRule::NoCeiling;
  throw InvalidArgument("unknown level rule '" + std::string(name) + "'");
}

double quantile_level(std::size_t n, double alpha, LevelRule rule) {
  if (n == 0) throw InvalidArgument("quantile level needs n >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  const double nd = static_cast<double>(n);
  double target = (1.0 - alpha) * (nd + 1.0);
  // Guard against (1 - alpha)(n + 1) landing one ulp above an integer.
  if (rule == LevelRule::Ceiling) target = std::ceil(target - 1e-9);
  return std::min(target / nd, 1.0);
}

namespace {

struct SortedMass {
  std::vector<double> scores;
  std::vector<double> cumulative;  // running raw sum over the total
};

SortedMass sort_by_score(std::span<const double> scores, std::span<const double> weights) {
  if (scores.empty() || scores.size() != weights.size())
    throw LengthMismatch("weighted quantile needs equal, non-empty score and weight arrays");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InvalidArgument("weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("weights sum to zero");

  SortedMass out;
  out.scores.reserve(order.size());
  out.cumulative.reserve(order.size());
  double running = 0.0;
  for (auto i : order) {
    running += weights[i];
    out.scores.push_back(scores[i]);
    out.cumulative.push_back(running / total);
  }
  return out;
}

}  // namespace

double weighted_quantile_stepwise(std::span<const double> scores, std::span<const double> weights,
                                  double q) {
  const auto mass = sort_by_score(scores, weights);
  for (std::size_t i = 0; i < mass.scores.size(); ++i)
    if (mass.cumulative[i] >= q) return mass.scores[i];
  return mass.scores.back();
}

double weighted_quantile_interpolated(std::span<const double> scores,
                                      std::span<const double> weights, double q) {
  const auto mass = sort_by_score(scores, weights);
  const auto& c = mass.cumulative;
  const auto& s = mass.scores;
  if (q <= c.front()) return s.front();
  if (q >= c.back()) return s.back();
  // First knot with cumulative weight >= q; its predecessor is below q.
  const auto hi = static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), q) - c.begin());
  const auto lo = hi - 1;
  const double span = c[hi] - c[lo];
  if (!(span > 0.0)) return s[hi];
  const double t = (q - c[lo]) / span;
  return s[lo] + t * (s[hi] - s[lo]);
}

double weighted_quantile(QuantileMethod method, std::span<const double> scores,
                         std::span<const double> weights, double q) {
  return method == QuantileMethod::Stepwise ? weighted_quantile_stepwise(scores, weights, q)
                                            : weighted_quantile_interpolated(scores, weights, q);
}

double bandwidth_objective(const CalibrationScores& fit, const CalibrationScores& holdout,
                           double sigma, double alpha, QuantileMethod method, LevelRule rule) {
  const double q = quantile_level(fit.size(), alpha, rule);
  const KernelPolicy kernel = FixedSigmaKernel{sigma};
  double total = 0.0;
  for (std::size_t j = 0; j < holdout.size(); ++j) {
    const auto w = geo_weights(holdout.coords[j], fit.coords, kernel);
    const double t = weighted_quantile(method, fit.scores, w.weights, q);
    // Interval centred on the prediction; the observation sits at distance
    // equal to its score.
    total += interval_score(-t, t, holdout.scores[j], alpha);
  }
  return total / static_cast<double>(holdout.size());
}

double effective_sample_size(std::span<const double> weights) {
  double sum = 0.0, sq = 0.0;
  for (double w : weights) {
    sum += w;
    sq += w * w;
  }
  return sq > 0.0 ? sum * sum / sq : 0.0;
}

namespace {

double median_effective_n(const CalibrationScores& fit, const CalibrationScores& holdout,
                          double sigma) {
  std::vector<double> n_eff;
  n_eff.reserve(holdout.size());
  for (const auto& p : holdout.coords)
    n_eff.push_back(effective_sample_size(geo_weights(p, fit.coords, FixedSigmaKernel{sigma}).weights));
  const auto mid = n_eff.begin() + static_cast<std::ptrdiff_t>(n_eff.size() / 2);
  std::nth_element(n_eff.begin(), mid, n_eff.end());
  return *mid;
}

}  // namespace

HoldoutSplit split_holdout(const CalibrationScores& calib, double holdout_frac, Rng& rng) {
  std::vector<std::size_t> order(calib.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span(order));
  const auto n_holdout = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(holdout_frac * static_cast<double>(calib.size()))), 1,
      calib.size() - 1);

  HoldoutSplit out;
  for (std::size_t r = 0; r < order.size(); ++r) {
    auto& dst = r < n_holdout ? out.holdout : out.fit;
    dst.coords.push_back(calib.coords[order[r]]);
    dst.scores.push_back(calib.scores[order[r]]);
  }
  return out;
}

double optimize_bandwidth(const CalibrationScores& calib, const BandwidthSearch& search,
                          double alpha, QuantileMethod method, LevelRule rule) {
  calib.validate();
  if (calib.size() < 10)
    throw InsufficientCalibration("bandwidth search needs at least 10 calibration points, got " +
                                  std::to_string(calib.size()));
  if (!(search.sigma_min > 0.0) || search.sigma_max < search.sigma_min)
    throw InvalidArgument("bandwidth bounds must satisfy 0 < sigma_min <= sigma_max");
  if (!(search.holdout_frac > 0.0 && search.holdout_frac <= 0.5))
    throw InvalidArgument("holdout fraction must lie in (0, 0.5]");
  if (search.n_starts == 0) throw InvalidArgument("bandwidth search needs at least one start");
  if (!(search.min_effective_n >= 0.0))
    throw InvalidArgument("minimum effective sample size must be nonnegative");
  if (search.sigma_min == search.sigma_max) return search.sigma_min;

  Rng rng(search.seed);
  const auto [fit, holdout] = split_holdout(calib, search.holdout_frac, rng);

  double lo = std::log(search.sigma_min);
  const double hi = std::log(search.sigma_max);
  if (search.min_effective_n > 0.0 &&
      median_effective_n(fit, holdout, search.sigma_min) < search.min_effective_n) {
    // Effective size grows with sigma; bisect for the smallest admissible one.
    double a = lo, b = hi;
    if (median_effective_n(fit, holdout, search.sigma_max) < search.min_effective_n) {
      a = hi;
    } else {
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (a + b);
        (median_effective_n(fit, holdout, std::exp(mid)) < search.min_effective_n ? a : b) = mid;
      }
      a = b;
    }
    lo = a;
  }
  if (lo >= hi) return search.sigma_max;
  auto objective = [&](double log_sigma) {
    return bandwidth_objective(fit, holdout, std::exp(log_sigma), alpha, method, rule);
  };

  // Starts are log-spaced and include both bounds; interior starts are
  // jittered within their stratum.
  std::vector<double> starts;
  const std::size_t n = search.n_starts;
  if (n == 1) {
    starts.push_back(0.5 * (lo + hi));
  } else {
    const double spacing = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      double s = lo + spacing * static_cast<double>(i);
      if (i > 0 && i + 1 < n) s += (rng.uniform() - 0.5) * spacing;
      starts.push_back(s);
    }
  }

  double best_x = starts.front();
  double best_f = std::numeric_limits<double>::infinity();
  const double min_step = 1e-4 * (hi - lo);
  for (double x : starts) {
    double fx = objective(x);
    // Compass search in log-bandwidth; moves only on strict improvement.
    double step = (hi - lo) / static_cast<double>(2 * n);
    while (step > min_step) {
      bool moved = false;
      for (double candidate : {x - step, x + step}) {
        candidate = std::clamp(candidate, lo, hi);
        if (candidate == x) continue;
        const double fc = objective(candidate);
        if (fc < fx) {
          x = candidate;
          fx = fc;
          moved = true;
          break;
        }
      }
      if (!moved) step *= 0.5;
    }
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  return std::clamp(std::exp(best_x), search.sigma_min, search.sigma_max);
}

CoordinateScaler::CoordinateScaler(std::span<const Point2> reference) {
  if (reference.empty()) return;
  const double n = static_cast<double>(reference.size());
  for (const auto& p : reference) {
    mean_x_ += p.x / n;
    mean_y_ += p.y / n;
  }
  double vx = 0.0, vy = 0.0;
  for (const auto& p : reference) {
    vx += (p.x - mean_x_) * (p.x - mean_x_) / n;
    vy += (p.y - mean_y_) * (p.y - mean_y_) / n;
  }
  scale_x_ = vx > 0.0 ? std::sqrt(vx) : 1.0;
  scale_y_ = vy > 0.0 ? std::sqrt(vy) : 1.0;
}

Point2 CoordinateScaler::operator()(const Point2& p) const {
  return {(p.x - mean_x_) / scale_x_, (p.y - mean_y_) / scale_y_};
}

std::vector<Point2> CoordinateScaler::apply(std::span<const Point2> pts) const {
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back((*this)(p));
  return out;
}

GeoCPResult run_geocp(std::span<const double> calib_predictions,
                      std::span<const double> calib_observations,
                      std::span<const Point2> calib_coords,
                      std::span<const double> test_predictions,
                      std::span<const Point2> test_coords, const GeoCPConfig& config) {
  if (calib_predictions.size() != calib_observations.size() ||
      calib_predictions.size() != calib_coords.size())
    throw LengthMismatch("calibration arrays differ in length");
  if (test_predictions.size() != test_coords.size())
    throw LengthMismatch("test predictions and coordinates differ in length");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw InvalidArgument("alpha must lie in (0, 1)");

  const CoordinateScaler scaler(calib_coords);
  CalibrationScores calib;
  calib.coords = scaler.apply(calib_coords);
  for (std::size_t i = 0; i < calib_predictions.size(); ++i)
    calib.scores.push_back(nonconformity_abs(calib_predictions[i], calib_observations[i]));
  calib.validate();
  const auto tests = scaler.apply(test_coords);

  GeoCPResult result;
  KernelPolicy kernel = config.kernel;
  if (const auto* opt = std::get_if<OptimizedSigmaKernel>(&config.kernel)) {
    const double sigma =
        optimize_bandwidth(calib, opt->search, config.alpha, config.method, config.level_rule);
    result.sigma = sigma;
    kernel = FixedSigmaKernel{sigma};
  }

  const double q = quantile_level(calib.size(), config.alpha, config.level_rule);
  result.intervals.resize(tests.size());
  std::vector<char> degenerate(tests.size(), 0);
  parallel_for(tests.size(), [&](std::size_t t) {
    const auto w = geo_weights(tests[t], calib.coords, kernel);
    degenerate[t] = w.degenerate ? 1 : 0;
    const double threshold = weighted_quantile(config.method, calib.scores, w.weights, q);
    const double center = test_predictions[t];
    result.intervals[t] = {center - threshold, center + threshold, threshold, center};
  });
  result.degenerate_weights =
      static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
  return result;
}

std::vector<double> baseline_predict_knn(const Eigen::MatrixXd& train_features,
                                         std::span<const double> train_targets,
                                         const Eigen::MatrixXd& query_features, std::size_t k) {
  if (k == 0) throw InvalidArgument("knn predictor needs k >= 1");
  if (train_features.rows() == 0 ||
      static_cast<std::size_t>(train_features.rows()) != train_targets.size())
    throw LengthMismatch("training features and targets differ in length");
  if (query_features.cols() != train_features.cols())
    throw LengthMismatch("query and training features differ in width");

  const Eigen::RowVectorXd mean = train_features.colwise().mean();
  Eigen::RowVectorXd scale =
      ((train_features.rowwise() - mean).array().square().colwise().sum() /
       static_cast<double>(train_features.rows()))
          .sqrt()
          .matrix();
  for (Eigen::Index j = 0; j < scale.size(); ++j)
    if (!(scale(j) > 0.0)) scale(j) = 1.0;
  const Eigen::MatrixXd train =
      (train_features.rowwise() - mean).array().rowwise() / scale.array();
  const Eigen::MatrixXd query =
      (query_features.rowwise() - mean).array().rowwise() / scale.array();

  const auto n = static_cast<std::size_t>(train.rows());
  k = std::min(k, n);
  std::vector<double> out(static_cast<std::size_t>(query.rows()));
  parallel_for(out.size(), [&](std::size_t r) {
    std::vector<std::pair<double, std::size_t>> d(n);
    for (std::size_t i = 0; i < n; ++i)
      d[i] = {(train.row(static_cast<Eigen::Index>(i)) - query.row(static_cast<Eigen::Index>(r)))
                  .squaredNorm(),
              i};
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += train_targets[d[i].second];
    out[r] = sum / static_cast<double>(k);
  });
  return out;
}

}  // namespace geostat

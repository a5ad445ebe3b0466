#include "geostat/variogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "geostat/errors.hpp"
#include "geostat/random.hpp"

namespace geostat {

std::string_view to_string(VariogramKind kind) {
  switch (kind) {
    case VariogramKind::OriginalExponential: return "original_exponential";
    case VariogramKind::Exponential: return "exponential";
    case VariogramKind::Gaussian: return "gaussian";
    case VariogramKind::Linear: return "linear";
    case VariogramKind::PoweredExponential: return "powered_exponential";
  }
  return "unknown";
}

VariogramKind parse_variogram_kind(std::string_view name) {
  for (auto kind : {VariogramKind::OriginalExponential, VariogramKind::Exponential,
                    VariogramKind::Gaussian, VariogramKind::Linear,
                    VariogramKind::PoweredExponential})
    if (to_string(kind) == name) return kind;
  throw InvalidArgument("unknown variogram kind '" + std::string(name) + "'");
}

VariogramSpec::VariogramSpec(VariogramKind kind, double nugget, double partial_sill, double range,
                             double exponent)
    : kind_(kind),
      nugget_(nugget),
      partial_sill_(partial_sill),
      range_(range),
      exponent_(kind == VariogramKind::PoweredExponential ? exponent : 1.0) {
  if (!(nugget_ >= 0.0) || !std::isfinite(nugget_))
    throw InvalidArgument("variogram nugget must be finite and >= 0");
  if (!(partial_sill_ >= 0.0) || !std::isfinite(partial_sill_))
    throw InvalidArgument("variogram partial sill must be finite and >= 0");
  if (!(range_ > 0.0) || !std::isfinite(range_))
    throw InvalidArgument("variogram range must be finite and > 0");
  if (kind == VariogramKind::PoweredExponential && !(exponent > 0.0 && exponent <= 2.0))
    throw InvalidArgument("powered-exponential exponent must lie in (0, 2]");
}

double VariogramSpec::operator()(double h) const {
  double shape = 0.0;
  switch (kind_) {
    case VariogramKind::OriginalExponential: shape = 1.0 - std::exp(-h * range_); break;
    case VariogramKind::Exponential: shape = 1.0 - std::exp(-h / range_); break;
    case VariogramKind::Gaussian: {
      const double r = h / range_;
      shape = 1.0 - std::exp(-r * r);
      break;
    }
    case VariogramKind::PoweredExponential:
      // Exact reproduction of the exponential and Gaussian special cases.
      if (exponent_ == 1.0) {
        shape = 1.0 - std::exp(-h / range_);
      } else if (exponent_ == 2.0) {
        const double r = h / range_;
        shape = 1.0 - std::exp(-r * r);
      } else {
        shape = 1.0 - std::exp(-std::pow(h / range_, exponent_));
      }
      break;
    case VariogramKind::Linear: shape = std::min(h / range_, 1.0); break;
  }
  return nugget_ + partial_sill_ * shape;
}

double EmpiricalVariogram::max_gamma() const {
  return gamma.empty() ? 0.0 : *std::max_element(gamma.begin(), gamma.end());
}

std::size_t auto_n_lags(std::size_t n) {
  const auto rounded = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  return std::clamp<std::size_t>(rounded, 8, 20);
}

namespace {

struct Pair {
  double distance;
  double half_sq;  // 0.5 * (z_i - z_j)^2
};

std::vector<Pair> all_pairs(const PointSet& ps) {
  const auto pts = ps.points();
  const auto vals = ps.values();
  std::vector<Pair> pairs;
  pairs.reserve(ps.size() * (ps.size() - 1) / 2);
  for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      const double dz = vals[i] - vals[j];
      pairs.push_back({distance(pts[i], pts[j]), 0.5 * dz * dz});
    }
  }
  return pairs;
}

// Linear-interpolation percentile of sorted data, p in [0, 1].
double sorted_quantile(std::span<const double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double trimmed_chi2_mean(double t) {
  if (t <= 0.0) return 1.0;
  const double c1 = normal_quantile(0.5 * (1.0 + t));
  const double c2 = normal_quantile(1.0 - 0.5 * t);
  const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  auto pdf = [&](double z) { return inv_sqrt_2pi * std::exp(-0.5 * z * z); };
  const double mass = normal_cdf(c2) - normal_cdf(c1);
  return 2.0 * (mass - (c2 * pdf(c2) - c1 * pdf(c1))) / (1.0 - 2.0 * t);
}

namespace {

double trimmed_mean(std::vector<double>& values, double trim_frac) {
  std::sort(values.begin(), values.end());
  const auto cut = static_cast<std::size_t>(std::floor(trim_frac * static_cast<double>(values.size())));
  double sum = 0.0;
  for (std::size_t i = cut; i < values.size() - cut; ++i) sum += values[i];
  const double mean = sum / static_cast<double>(values.size() - 2 * cut);
  return mean / trimmed_chi2_mean(static_cast<double>(cut) / static_cast<double>(values.size()));
}

struct BinAccumulator {
  double lower = 0.0;
  double upper = 0.0;
  double distance_sum = 0.0;
  std::vector<double> half_sq;
};

EmpiricalVariogram finalize(std::vector<BinAccumulator>& bins, std::size_t min_pairs,
                            double trim_frac, bool weight_by_pairs) {
  EmpiricalVariogram emp;
  for (auto& bin : bins) {
    const std::size_t count = bin.half_sq.size();
    if (count == 0 || count < min_pairs) continue;
    const double gamma = trim_frac > 0.0
                             ? trimmed_mean(bin.half_sq, trim_frac)
                             : std::accumulate(bin.half_sq.begin(), bin.half_sq.end(), 0.0) /
                                   static_cast<double>(count);
    if (!std::isfinite(gamma)) continue;
    emp.lag_centers.push_back(bin.distance_sum / static_cast<double>(count));
    emp.gamma.push_back(gamma);
    emp.pair_counts.push_back(count);
    emp.bin_weights.push_back(weight_by_pairs ? static_cast<double>(count) : 1.0);
    emp.bin_lower.push_back(bin.lower);
    emp.bin_upper.push_back(bin.upper);
  }
  if (emp.size() == 0) throw AllBinsEmpty("no variogram bin has enough pairs");
  return emp;
}

}  // namespace

EmpiricalVariogram empirical_variogram_fixed(const PointSet& ps, const FixedBinning& config) {
  if (ps.size() < 2) throw InvalidArgument("empirical variogram needs at least 2 points");
  if (config.n_lags < 2) throw InvalidArgument("empirical variogram needs at least 2 lags");
  if (!(config.truncate_frac > 0.0 && config.truncate_frac <= 1.0))
    throw InvalidArgument("truncate fraction must lie in (0, 1]");

  const auto pairs = all_pairs(ps);
  double max_d = 0.0;
  for (const auto& p : pairs) max_d = std::max(max_d, p.distance);
  const double cutoff = config.truncate_frac * max_d;
  const double width = cutoff / static_cast<double>(config.n_lags);

  std::vector<BinAccumulator> bins(config.n_lags);
  for (std::size_t k = 0; k < bins.size(); ++k) {
    bins[k].lower = width * static_cast<double>(k);
    bins[k].upper = k + 1 == bins.size() ? cutoff : width * static_cast<double>(k + 1);
  }
  for (const auto& p : pairs) {
    if (p.distance > cutoff) continue;
    if (p.distance == 0.0 && !config.include_zero) continue;
    std::size_t k = width > 0.0 ? static_cast<std::size_t>(p.distance / width) : 0;
    k = std::min(k, config.n_lags - 1);
    bins[k].distance_sum += p.distance;
    bins[k].half_sq.push_back(p.half_sq);
  }
  return finalize(bins, config.min_pairs, 0.0, false);
}

std::size_t silverman_bin_count(std::span<const double> pair_distances, std::size_t n_points) {
  std::vector<double> sorted(pair_distances.begin(), pair_distances.end());
  std::sort(sorted.begin(), sorted.end());
  const double count = static_cast<double>(sorted.size());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / count;
  double ss = 0.0;
  for (double d : sorted) ss += (d - mean) * (d - mean);
  const double sd = sorted.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  const double bandwidth = 0.9 * spread * std::pow(count, -0.2);
  const double span = sorted.back() - sorted.front();

  std::size_t bins = 20;
  if (bandwidth > 0.0) {
    const double raw = std::ceil(span / bandwidth);
    bins = raw >= 20.0 ? 20 : std::max<std::size_t>(8, static_cast<std::size_t>(raw));
  }
  return std::min(bins, auto_n_lags(n_points));
}

EmpiricalVariogram empirical_variogram_adaptive(const PointSet& ps, const AdaptiveBinning& config) {
  if (ps.size() < 8) throw InvalidArgument("adaptive binning needs at least 8 points");
  if (!(config.trim_frac >= 0.0 && config.trim_frac <= 0.25))
    throw InvalidArgument("trim fraction must lie in [0, 0.25]");

  if (!(config.max_lag_frac > 0.0 && config.max_lag_frac <= 1.0))
    throw InvalidArgument("max lag fraction must lie in (0, 1]");

  auto pairs = all_pairs(ps);
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& a, const Pair& b) { return a.distance < b.distance; });
  const double cutoff = config.max_lag_frac * pairs.back().distance;
  while (pairs.size() > 1 && pairs.back().distance > cutoff) pairs.pop_back();
  const std::size_t n_pairs = pairs.size();

  std::vector<BinAccumulator> bins;
  if (config.mode == AdaptiveMode::Silverman) {
    std::vector<double> distances(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) distances[i] = pairs[i].distance;
    const std::size_t count = silverman_bin_count(distances, ps.size());
    const double lo = distances.front();
    const double hi = distances.back();
    const double width = (hi - lo) / static_cast<double>(count);
    bins.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      bins[k].lower = lo + width * static_cast<double>(k);
      bins[k].upper = k + 1 == count ? hi : lo + width * static_cast<double>(k + 1);
    }
    for (const auto& p : pairs) {
      std::size_t k = width > 0.0 ? static_cast<std::size_t>((p.distance - lo) / width) : 0;
      k = std::min(k, count - 1);
      bins[k].distance_sum += p.distance;
      bins[k].half_sq.push_back(p.half_sq);
    }
  } else {
    // Equal-probability bins: contiguous rank blocks of the sorted distances.
    const std::size_t count = std::min(auto_n_lags(ps.size()), n_pairs);
    bins.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t begin = k * n_pairs / count;
      const std::size_t end = (k + 1) * n_pairs / count;
      bins[k].lower = pairs[begin].distance;
      bins[k].upper = pairs[end - 1].distance;
      for (std::size_t i = begin; i < end; ++i) {
        bins[k].distance_sum += pairs[i].distance;
        bins[k].half_sq.push_back(pairs[i].half_sq);
      }
    }
  }
  return finalize(bins, config.min_pairs, config.trim_frac, true);
}

EmpiricalVariogram empirical_variogram(const PointSet& ps, const BinningConfig& config) {
  return std::visit(
      [&](const auto& c) -> EmpiricalVariogram {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, FixedBinning>)
          return empirical_variogram_fixed(ps, c);
        else
          return empirical_variogram_adaptive(ps, c);
      },
      config);
}

std::string_view to_string(Loss loss) {
  switch (loss) {
    case Loss::L1: return "l1";
    case Loss::WeightedL1: return "weighted_l1";
    case Loss::L2: return "l2";
    case Loss::WLS: return "wls";
  }
  return "unknown";
}

Loss parse_loss(std::string_view name) {
  for (auto loss : {Loss::L1, Loss::WeightedL1, Loss::L2, Loss::WLS})
    if (to_string(loss) == name) return loss;
  throw InvalidArgument("unknown loss '" + std::string(name) + "'");
}

std::string_view to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::AIC: return "aic";
    case Criterion::BIC: return "bic";
    case Criterion::MinLoss: return "min_loss";
  }
  return "unknown";
}

Criterion parse_criterion(std::string_view name) {
  for (auto c : {Criterion::AIC, Criterion::BIC, Criterion::MinLoss})
    if (to_string(c) == name) return c;
  throw InvalidArgument("unknown selection criterion '" + std::string(name) + "'");
}

InformationCriteria information_criteria(std::span<const double> residuals, std::size_t k,
                                         std::size_t n) {
  if (n < k) throw InvalidArgument("information criteria need n >= k");
  double rss = 0.0;
  for (double r : residuals) rss += r * r;
  const double nd = static_cast<double>(n);
  const double variance = std::max(rss / nd, 1e-12);
  const double log_likelihood = -0.5 * nd * (std::log(2.0 * std::numbers::pi * variance) + 1.0);
  return {2.0 * static_cast<double>(k) - 2.0 * log_likelihood,
          static_cast<double>(k) * std::log(nd) - 2.0 * log_likelihood};
}

namespace {

bool uses_rate(VariogramKind kind) { return kind == VariogramKind::OriginalExponential; }

VariogramSpec spec_from(VariogramKind kind, const std::vector<double>& theta, double exponent) {
  const double p = theta.size() > 3 ? theta[3] : exponent;
  return VariogramSpec(kind, theta[0], theta[1], theta[2], p);
}

double loss_value(const EmpiricalVariogram& emp, const VariogramSpec& spec, Loss loss) {
  double total = 0.0;
  for (std::size_t k = 0; k < emp.size(); ++k) {
    const double r = emp.gamma[k] - spec(emp.lag_centers[k]);
    switch (loss) {
      case Loss::L1: total += std::abs(r); break;
      case Loss::WeightedL1: total += emp.bin_weights[k] * std::abs(r); break;
      case Loss::L2: total += r * r; break;
      case Loss::WLS: total += emp.bin_weights[k] * r * r; break;
    }
  }
  return total;
}

std::vector<std::vector<double>> latin_hypercube(const Box& box, std::size_t count, Rng& rng) {
  std::vector<std::vector<double>> points(count, std::vector<double>(box.dim()));
  std::vector<std::size_t> strata(count);
  for (std::size_t d = 0; d < box.dim(); ++d) {
    std::iota(strata.begin(), strata.end(), 0);
    rng.shuffle(std::span(strata));
    for (std::size_t i = 0; i < count; ++i) {
      const double u = (static_cast<double>(strata[i]) + rng.uniform()) / static_cast<double>(count);
      points[i][d] = box.lower[d] + u * (box.upper[d] - box.lower[d]);
    }
  }
  return points;
}

double min_positive_lag(const EmpiricalVariogram& emp) {
  double best = std::numeric_limits<double>::infinity();
  for (double h : emp.lag_centers)
    if (h > 0.0) best = std::min(best, h);
  return best;
}

}  // namespace

Box default_bounds(const EmpiricalVariogram& emp, VariogramKind kind, bool free_exponent) {
  const double max_gamma = emp.max_gamma();
  const double max_lag = emp.lag_centers.empty() ? 0.0 : emp.lag_centers.back();
  double min_lag = min_positive_lag(emp);
  if (!std::isfinite(min_lag)) min_lag = max_lag > 0 ? max_lag : 1.0;
  const double sill_floor = 1e-10 * max_gamma;

  Box box;
  box.lower = {0.0, sill_floor, min_lag};
  box.upper = {max_gamma, 2.0 * max_gamma, std::max(2.0 * max_lag, min_lag)};
  if (uses_rate(kind)) {
    box.lower[2] = 1.0 / box.upper[2];
    box.upper[2] = 1.0 / min_lag;
  }
  if (free_exponent) {
    box.lower.push_back(0.05);
    box.upper.push_back(2.0);
  }
  return box;
}

FitReport fit_variogram(const EmpiricalVariogram& emp, VariogramKind kind,
                        const FitOptions& options) {
  const bool free_exponent =
      kind == VariogramKind::PoweredExponential && !options.fixed_exponent.has_value();
  const std::size_t free_params = free_exponent ? 4 : 3;
  if (emp.size() < free_params)
    throw FitFailed("fitting " + std::string(to_string(kind)) + " needs at least " +
                    std::to_string(free_params) + " bins, got " + std::to_string(emp.size()));
  if (options.n_starts == 0) throw InvalidArgument("fit needs at least one start");
  const double max_gamma = emp.max_gamma();
  if (!(max_gamma > 0.0)) throw DegenerateVariogram("empirical variogram is identically zero");

  const double exponent = options.fixed_exponent.value_or(1.0);
  const Box box = options.bounds.value_or(default_bounds(emp, kind, free_exponent));
  if (box.dim() != free_params)
    throw InvalidArgument("fit bounds have " + std::to_string(box.dim()) + " entries, expected " +
                          std::to_string(free_params));

  auto objective = [&](const std::vector<double>& theta) {
    return loss_value(emp, spec_from(kind, theta, exponent), options.loss);
  };

  std::vector<std::vector<double>> starts;
  if (options.smart_start) {
    std::vector<double> smart(free_params);
    smart[0] = emp.gamma.front();
    smart[1] = max_gamma - smart[0];
    const double half_lag = 0.5 * emp.lag_centers.back();
    smart[2] = uses_rate(kind) ? 1.0 / half_lag : half_lag;
    if (free_exponent) smart[3] = 1.0;
    starts.push_back(box.clamp(std::move(smart)));
  } else {
    std::vector<double> center(free_params);
    for (std::size_t i = 0; i < free_params; ++i) center[i] = 0.5 * (box.lower[i] + box.upper[i]);
    starts.push_back(std::move(center));
  }
  if (options.n_starts > 1) {
    Rng rng(options.seed);
    for (auto& p : latin_hypercube(box, options.n_starts - 1, rng)) starts.push_back(std::move(p));
  }

  std::optional<MinimizeResult> best;
  bool any_converged = false;
  for (const auto& start : starts) {
    auto result = minimize_nelder_mead(objective, box, start);
    any_converged = any_converged || result.converged;
    if (!std::isfinite(result.value)) continue;
    if (!best || result.value < best->value) best = std::move(result);
  }
  if (!best || !any_converged)
    throw FitFailed("no start converged when fitting " + std::string(to_string(kind)));

  const double sill_floor = 1e-10 * max_gamma;
  if (best->x[1] < sill_floor)
    throw DegenerateVariogram("fitted partial sill is below the sill floor");

  FitReport report{spec_from(kind, best->x, exponent)};
  report.loss_value = best->value;
  std::vector<double> residuals(emp.size());
  for (std::size_t k = 0; k < emp.size(); ++k) {
    residuals[k] = emp.gamma[k] - report.spec(emp.lag_centers[k]);
    report.rss += residuals[k] * residuals[k];
  }
  report.parameter_count = free_params;
  const auto ic = information_criteria(residuals, free_params, emp.size());
  report.aic = ic.aic;
  report.bic = ic.bic;
  report.n_starts_tried = starts.size();
  report.converged = true;
  return report;
}

double smoothness_to_exponent(double nu) { return std::min(2.0, 2.0 * nu / (nu + 1.0)); }

std::vector<double> default_exponent_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 15; ++i) grid.push_back(smoothness_to_exponent(i / 5.0));
  return grid;
}

FitReport select_variogram(const EmpiricalVariogram& emp, const SelectOptions& options) {
  if (options.candidates.empty()) throw InvalidArgument("model selection needs candidates");

  struct Scored {
    FitReport report;
    double score;
  };
  std::optional<Scored> best;
  std::string last_failure;

  auto consider = [&](FitReport report, std::size_t counted_params) {
    if (emp.size() < counted_params) return;
    if (counted_params != report.parameter_count) {
      std::vector<double> residuals(emp.size());
      for (std::size_t k = 0; k < emp.size(); ++k)
        residuals[k] = emp.gamma[k] - report.spec(emp.lag_centers[k]);
      const auto ic = information_criteria(residuals, counted_params, emp.size());
      report.aic = ic.aic;
      report.bic = ic.bic;
      report.parameter_count = counted_params;
    }
    double score = report.loss_value;
    if (options.criterion == Criterion::AIC) score = report.aic;
    if (options.criterion == Criterion::BIC) score = report.bic;
    // Strict improvement, or an exact tie resolved by fewer parameters;
    // remaining ties keep the earlier candidate.
    if (!best || score < best->score ||
        (score == best->score && report.parameter_count < best->report.parameter_count))
      best = Scored{std::move(report), score};
  };

  for (auto kind : options.candidates) {
    try {
      if (kind == VariogramKind::PoweredExponential && !options.exponent_grid.empty() &&
          !options.fit.fixed_exponent) {
        // The grid choice of exponent counts as a fourth parameter.
        for (double p : options.exponent_grid) {
          FitOptions fit = options.fit;
          fit.fixed_exponent = p;
          try {
            consider(fit_variogram(emp, kind, fit), 4);
          } catch (const FitFailed& e) {
            last_failure = e.what();
          } catch (const DegenerateVariogram& e) {
            last_failure = e.what();
          }
        }
      } else {
        FitReport report = fit_variogram(emp, kind, options.fit);
        const std::size_t params = report.parameter_count;
        consider(std::move(report), params);
      }
    } catch (const FitFailed& e) {
      last_failure = e.what();
    } catch (const DegenerateVariogram& e) {
      last_failure = e.what();
    }
  }
  if (!best) throw FitFailed("every candidate variogram failed to fit: " + last_failure);
  return std::move(best->report);
}

}  // namespace geostat

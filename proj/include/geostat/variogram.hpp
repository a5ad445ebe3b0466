#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geostat/optimize.hpp"
#include "geostat/spatial.hpp"

namespace geostat {

enum class VariogramKind { OriginalExponential, Exponential, Gaussian, Linear, PoweredExponential };

std::string_view to_string(VariogramKind kind);
VariogramKind parse_variogram_kind(std::string_view name);

// Isotropic variogram model.
//
//   OriginalExponential  nugget + sill * (1 - exp(-h * rate)), range() holds the rate
//   Exponential          nugget + sill * (1 - exp(-h / range))
//   Gaussian             nugget + sill * (1 - exp(-(h / range)^2))
//   PoweredExponential   nugget + sill * (1 - exp(-(h / range)^p)),  0 < p <= 2
//   Linear               nugget + sill * min(h / range, 1)
//
// Every kind is nondecreasing in h. At h = 0 the model returns the nugget
// (the right limit); the kriging system treats zero separation separately.
class VariogramSpec {
 public:
  // Throws InvalidArgument for negative nugget or sill, non-positive range,
  // or an exponent outside (0, 2].
  VariogramSpec(VariogramKind kind, double nugget, double partial_sill, double range,
                double exponent = 1.0);

  VariogramKind kind() const noexcept { return kind_; }
  double nugget() const noexcept { return nugget_; }
  double partial_sill() const noexcept { return partial_sill_; }
  double range() const noexcept { return range_; }
  double exponent() const noexcept { return exponent_; }
  double sill() const noexcept { return nugget_ + partial_sill_; }

  // Semivariance at lag h >= 0.
  double operator()(double h) const;

  // Covariance C(h) = sill - gamma(h) for h > 0 and C(0) = sill.
  double covariance(double h) const { return h == 0.0 ? sill() : sill() - (*this)(h); }

  friend bool operator==(const VariogramSpec&, const VariogramSpec&) = default;

 private:
  VariogramKind kind_;
  double nugget_;
  double partial_sill_;
  double range_;
  double exponent_;
};

inline double model_eval(const VariogramSpec& spec, double h) { return spec(h); }

// Binned semivariance estimates, one entry per retained bin.
struct EmpiricalVariogram {
  std::vector<double> lag_centers;  // mean pair distance in the bin, ascending
  std::vector<double> gamma;
  std::vector<std::size_t> pair_counts;
  std::vector<double> bin_weights;
  std::vector<double> bin_lower;
  std::vector<double> bin_upper;

  std::size_t size() const noexcept { return lag_centers.size(); }
  double max_gamma() const;
};

struct FixedBinning {
  std::size_t n_lags = 12;
  double truncate_frac = 1.0;  // bins cover [0, truncate_frac * max distance]
  bool include_zero = true;    // keep coincident pairs in the first bin
  std::size_t min_pairs = 1;
};

enum class AdaptiveMode { Silverman, Quantile };

struct AdaptiveBinning {
  AdaptiveMode mode = AdaptiveMode::Silverman;
  double trim_frac = 0.1;  // trimmed from each tail of a bin's half squared differences
  std::size_t min_pairs = 5;
  double max_lag_frac = 0.5;  // pairs beyond this fraction of the largest distance are ignored
};

using BinningConfig = std::variant<FixedBinning, AdaptiveBinning>;

// Mean of a chi-square(1) variable with fraction t trimmed from each tail.
double trimmed_chi2_mean(double t);

// round(sqrt(n)) clamped to [8, 20].
std::size_t auto_n_lags(std::size_t n);

// Equal-width bins; each estimate is half the mean squared value difference
// of the pairs in the bin. Throws AllBinsEmpty when no bin survives.
EmpiricalVariogram empirical_variogram_fixed(const PointSet& ps, const FixedBinning& config);

// Data-driven bins (Silverman bandwidth or equal-count quantiles) with
// trimmed-mean estimates; bin weights are the pair counts. Needs >= 8 points.
// Trimmed means are divided by trimmed_chi2_mean of the realised trim
// fraction, so they stay unbiased for Gaussian increments.
EmpiricalVariogram empirical_variogram_adaptive(const PointSet& ps, const AdaptiveBinning& config);

EmpiricalVariogram empirical_variogram(const PointSet& ps, const BinningConfig& config);

// Bin count from Silverman's rule of thumb applied to the pair distances,
// reconciled with auto_n_lags(n_points).
std::size_t silverman_bin_count(std::span<const double> pair_distances, std::size_t n_points);

enum class Loss {
  L1,          // sum |r|
  WeightedL1,  // sum w |r|
  L2,          // sum r^2
  WLS,         // sum w r^2
};

std::string_view to_string(Loss loss);
Loss parse_loss(std::string_view name);

struct InformationCriteria {
  double aic = 0.0;
  double bic = 0.0;
};

// Gaussian pseudo-likelihood criteria from per-bin residuals, with the
// variance estimate floored at 1e-12.
InformationCriteria information_criteria(std::span<const double> residuals, std::size_t k,
                                         std::size_t n);

struct FitOptions {
  Loss loss = Loss::L1;
  std::size_t n_starts = 1;
  std::uint64_t seed = 0;
  bool smart_start = true;               // first start from the empirical shape
  std::optional<double> fixed_exponent;  // PoweredExponential only; free in (0, 2] otherwise
  std::optional<Box> bounds;             // overrides default_bounds()
};

struct FitReport {
  VariogramSpec spec;
  double loss_value = 0.0;
  double rss = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  std::size_t parameter_count = 0;
  std::size_t n_starts_tried = 0;
  bool converged = false;
};

// Parameter box for (nugget, sill, range or rate[, exponent]).
Box default_bounds(const EmpiricalVariogram& emp, VariogramKind kind, bool free_exponent);

// Multi-start bounded fit of one model kind. Throws FitFailed when there are
// too few bins or no start converges, DegenerateVariogram for an all-zero
// empirical variogram or a sill below the floor.
FitReport fit_variogram(const EmpiricalVariogram& emp, VariogramKind kind,
                        const FitOptions& options);

enum class Criterion { AIC, BIC, MinLoss };

std::string_view to_string(Criterion criterion);
Criterion parse_criterion(std::string_view name);

struct SelectOptions {
  std::vector<VariogramKind> candidates;
  Criterion criterion = Criterion::AIC;
  FitOptions fit;
  std::vector<double> exponent_grid;  // PoweredExponential is fitted once per entry
};

// Fits every candidate and keeps the one minimising the criterion. Ties go to
// fewer parameters, then to candidate order.
FitReport select_variogram(const EmpiricalVariogram& emp, const SelectOptions& options);

// Smoothness-to-exponent mapping min(2, 2 nu / (nu + 1)).
double smoothness_to_exponent(double nu);

// Exponents for nu = 0.2, 0.4, ..., 3.0.
std::vector<double> default_exponent_grid();

}  // namespace geostat

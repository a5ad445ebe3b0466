#include "geostat/presets.hpp"

#include <string>

#include "geostat/errors.hpp"

namespace geostat {

std::string_view to_string(Task task) { return task == Task::Kriging ? "kriging" : "geocp"; }

Task parse_task(std::string_view name) {
  if (name == "kriging") return Task::Kriging;
  if (name == "geocp") return Task::GeoCP;
  throw InvalidArgument("unknown task '" + std::string(name) + "'");
}

namespace {

[[noreturn]] void unknown(std::string_view name) {
  throw UnknownPreset("unknown preset '" + std::string(name) +
                      "' (expected original, openevolve, openevolve_geoknow or geoevolve)");
}

}  // namespace

KrigingPreset kriging_preset(std::string_view name) {
  KrigingPreset p;
  p.name = std::string(name);
  if (name == "original") {
    // Single non-standard exponential, one unguided L1 run, global solve.
    p.candidates = {VariogramKind::OriginalExponential};
    p.loss = Loss::L1;
    p.n_starts = 1;
    p.smart_start = false;
    p.criterion = Criterion::MinLoss;
    p.binning = FixedBinning{12, 1.0, true, 1};
    p.solver = {SolverMode::Global, 25, Regularization::None, 0.0, Fallback::Fail};
    p.log_transform = false;
  } else if (name == "openevolve" || name == "openevolve_geoknow") {
    const bool geoknow = name == "openevolve_geoknow";
    p.candidates = {VariogramKind::Exponential, VariogramKind::Gaussian, VariogramKind::Linear};
    p.loss = geoknow ? Loss::L2 : Loss::L1;
    p.n_starts = 1;
    p.smart_start = true;
    p.criterion = Criterion::MinLoss;
    p.binning = FixedBinning{12, 0.85, true, geoknow ? std::size_t{5} : std::size_t{1}};
    p.solver = {SolverMode::Global, 25, Regularization::FixedDiagonal, 1e-10,
                Fallback::PseudoInverse};
    p.log_transform = false;
  } else if (name == "geoevolve") {
    p.candidates = {VariogramKind::Exponential, VariogramKind::Gaussian, VariogramKind::Linear,
                    VariogramKind::PoweredExponential};
    p.loss = Loss::WeightedL1;
    p.n_starts = 16;
    p.smart_start = true;
    p.criterion = Criterion::AIC;
    p.exponent_grid = default_exponent_grid();
    p.binning = AdaptiveBinning{AdaptiveMode::Silverman, 0.1, 5};
    p.solver = {SolverMode::Local, 25, Regularization::ConditionAdaptive, 1e-10,
                Fallback::NeighborMean};
    p.log_transform = true;
  } else {
    unknown(name);
  }
  return p;
}

GeoCPPreset geocp_preset(std::string_view name) {
  GeoCPPreset p;
  p.name = std::string(name);
  if (name == "original") {
    p.kernel = FixedLegacyKernel{};
    p.method = QuantileMethod::Stepwise;
    p.level_rule = LevelRule::Ceiling;
    p.metrics = MetricSet::IntervalScoreOnly;
  } else if (name == "openevolve") {
    p.kernel = KnnAdaptiveKernel{10, 0.01, 2.0, true};
    p.method = QuantileMethod::Interpolated;
    p.level_rule = LevelRule::Ceiling;
    p.metrics = MetricSet::Full;
  } else if (name == "openevolve_geoknow") {
    p.kernel = KnnAdaptiveKernel{10, 0.05, 0.5, false};
    p.method = QuantileMethod::Interpolated;
    p.level_rule = LevelRule::NoCeiling;
    p.metrics = MetricSet::Full;
  } else if (name == "geoevolve") {
    p.kernel = OptimizedSigmaKernel{BandwidthSearch{}};
    p.method = QuantileMethod::Stepwise;
    p.level_rule = LevelRule::NoCeiling;
    p.metrics = MetricSet::Full;
  } else {
    unknown(name);
  }
  return p;
}

Preset resolve_preset(Task task, std::string_view name) {
  if (task == Task::Kriging) return kriging_preset(name);
  return geocp_preset(name);
}

}  // namespace geostat

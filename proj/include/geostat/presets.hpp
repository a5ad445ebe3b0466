#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geostat/geocp.hpp"
#include "geostat/kriging.hpp"
#include "geostat/variogram.hpp"

namespace geostat {

// Stable preset names, in comparison-table order.
inline constexpr std::array<std::string_view, 4> kPresetNames = {
    "original", "openevolve", "openevolve_geoknow", "geoevolve"};

enum class Task { Kriging, GeoCP };

std::string_view to_string(Task task);
Task parse_task(std::string_view name);

struct KrigingPreset {
  std::string name;
  std::vector<VariogramKind> candidates;
  Loss loss = Loss::L1;
  std::size_t n_starts = 1;
  bool smart_start = true;
  Criterion criterion = Criterion::MinLoss;
  std::vector<double> exponent_grid;
  BinningConfig binning = FixedBinning{};
  SolverPolicy solver;
  bool log_transform = false;
};

enum class MetricSet { IntervalScoreOnly, Full };

struct GeoCPPreset {
  std::string name;
  KernelPolicy kernel = FixedLegacyKernel{};
  QuantileMethod method = QuantileMethod::Stepwise;
  LevelRule level_rule = LevelRule::Ceiling;
  MetricSet metrics = MetricSet::Full;
};

// Throw UnknownPreset for names outside kPresetNames.
KrigingPreset kriging_preset(std::string_view name);
GeoCPPreset geocp_preset(std::string_view name);

using Preset = std::variant<KrigingPreset, GeoCPPreset>;
Preset resolve_preset(Task task, std::string_view name);

}  // namespace geostat

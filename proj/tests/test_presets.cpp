#include <doctest.h>

#include "geostat/config.hpp"
#include "geostat/errors.hpp"
#include "geostat/presets.hpp"

using namespace geostat;

TEST_CASE("kriging presets") {
  const auto original = kriging_preset("original");
  CHECK(original.candidates == std::vector{VariogramKind::OriginalExponential});
  CHECK(original.loss == Loss::L1);
  CHECK(original.n_starts == 1);
  CHECK(original.solver.mode == SolverMode::Global);
  CHECK(original.solver.regularization == Regularization::None);
  CHECK(original.solver.fallback == Fallback::Fail);
  CHECK_FALSE(original.log_transform);
  const auto& bins = std::get<FixedBinning>(original.binning);
  CHECK(bins.n_lags == 12);
  CHECK(bins.include_zero);
  CHECK(bins.truncate_frac == 1.0);

  const auto oe = kriging_preset("openevolve");
  CHECK(oe.candidates.size() == 3);
  CHECK(oe.criterion == Criterion::MinLoss);
  CHECK(std::get<FixedBinning>(oe.binning).truncate_frac == 0.85);
  CHECK(oe.solver.regularization == Regularization::FixedDiagonal);
  CHECK(oe.solver.fixed_epsilon == 1e-10);
  CHECK(oe.solver.fallback == Fallback::PseudoInverse);

  const auto gk = kriging_preset("openevolve_geoknow");
  CHECK(gk.loss == Loss::L2);
  CHECK(std::get<FixedBinning>(gk.binning).min_pairs == 5);

  const auto ge = kriging_preset("geoevolve");
  CHECK(ge.candidates.back() == VariogramKind::PoweredExponential);
  CHECK(ge.n_starts == 16);
  CHECK(ge.criterion == Criterion::AIC);
  CHECK(ge.exponent_grid == default_exponent_grid());
  CHECK(std::get<AdaptiveBinning>(ge.binning).trim_frac == 0.1);
  CHECK(ge.solver.mode == SolverMode::Local);
  CHECK(ge.solver.neighbors == 25);
  CHECK(ge.solver.regularization == Regularization::ConditionAdaptive);
  CHECK(ge.solver.fallback == Fallback::NeighborMean);
  CHECK(ge.log_transform);
}

TEST_CASE("geocp presets") {
  const auto original = geocp_preset("original");
  CHECK(std::holds_alternative<FixedLegacyKernel>(original.kernel));
  CHECK(original.method == QuantileMethod::Stepwise);
  CHECK(original.level_rule == LevelRule::Ceiling);
  CHECK(original.metrics == MetricSet::IntervalScoreOnly);

  const auto oe = geocp_preset("openevolve");
  const auto& k = std::get<KnnAdaptiveKernel>(oe.kernel);
  CHECK(k.k == 10);
  CHECK(k.dispersion_floor);
  CHECK(oe.method == QuantileMethod::Interpolated);

  const auto gk = geocp_preset("openevolve_geoknow");
  const auto& k2 = std::get<KnnAdaptiveKernel>(gk.kernel);
  CHECK(k2.clip_lo == 0.05);
  CHECK(k2.clip_hi == 0.5);
  CHECK(gk.level_rule == LevelRule::NoCeiling);

  const auto ge = geocp_preset("geoevolve");
  CHECK(std::holds_alternative<OptimizedSigmaKernel>(ge.kernel));
  CHECK(ge.method == QuantileMethod::Stepwise);
  CHECK(ge.level_rule == LevelRule::NoCeiling);
}

TEST_CASE("preset lookup") {
  CHECK(std::holds_alternative<KrigingPreset>(resolve_preset(Task::Kriging, "original")));
  CHECK(std::holds_alternative<GeoCPPreset>(resolve_preset(Task::GeoCP, "geoevolve")));
  CHECK_THROWS_AS(resolve_preset(Task::Kriging, "bogus"), UnknownPreset);
  CHECK_THROWS_AS(geocp_preset(""), UnknownPreset);
  CHECK(parse_task("geocp") == Task::GeoCP);
  CHECK_THROWS_AS(parse_task("regression"), InvalidArgument);
  for (auto name : kPresetNames) {
    CHECK(to_json(kriging_preset(name)) == to_json(kriging_preset(name)));
    CHECK(to_json(geocp_preset(name)) == to_json(geocp_preset(name)));
  }
}

TEST_CASE("json round trip and overrides") {
  for (auto name : kPresetNames) {
    const auto kp = kriging_preset(name);
    auto blank = kriging_preset("original");
    apply_overrides(blank, to_json(kp));
    CHECK(to_json(blank) == to_json(kp));

    const auto gp = geocp_preset(name);
    auto gblank = geocp_preset("original");
    apply_overrides(gblank, to_json(gp));
    CHECK(to_json(gblank) == to_json(gp));
  }

  auto p = kriging_preset("geoevolve");
  apply_overrides(p, nlohmann::json::parse(R"({"loss": "wls", "solver": {"neighbors": 12}})"));
  CHECK(p.loss == Loss::WLS);
  CHECK(p.solver.neighbors == 12);
  CHECK(p.solver.mode == SolverMode::Local);
  CHECK(p.n_starts == 16);

  auto g = geocp_preset("original");
  apply_overrides(g, nlohmann::json::parse(R"({"kernel": {"type": "fixed_sigma", "sigma": 0.3}})"));
  CHECK(std::get<FixedSigmaKernel>(g.kernel).sigma == 0.3);

  CHECK_THROWS_AS(apply_overrides(p, nlohmann::json::parse(R"({"loss": "l7"})")), InvalidArgument);
  CHECK_THROWS_AS(apply_overrides(p, nlohmann::json::parse(R"({"n_starts": "many"})")),
                  InvalidArgument);
}

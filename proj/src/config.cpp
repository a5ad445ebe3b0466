#include "geostat/config.hpp"

#include <string>

#include "geostat/errors.hpp"

namespace geostat {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
  }
}

template <typename Enum, typename Parse>
void read_enum(const json& j, const char* key, Enum& out, Parse parse) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_string())
    throw InvalidArgument(std::string("config field '") + key + "' must be a string");
  out = parse(j.at(key).get<std::string>());
}

json binning_json(const BinningConfig& binning) {
  if (const auto* f = std::get_if<FixedBinning>(&binning))
    return {{"type", "fixed"},
            {"n_lags", f->n_lags},
            {"truncate_frac", f->truncate_frac},
            {"include_zero", f->include_zero},
            {"min_pairs", f->min_pairs}};
  const auto& a = std::get<AdaptiveBinning>(binning);
  return {{"type", "adaptive"},
          {"mode", a.mode == AdaptiveMode::Silverman ? "silverman" : "quantile"},
          {"trim_frac", a.trim_frac},
          {"min_pairs", a.min_pairs},
          {"max_lag_frac", a.max_lag_frac}};
}

json kernel_json(const KernelPolicy& kernel) {
  json j{{"type", std::string(kernel_name(kernel))}};
  if (const auto* f = std::get_if<FixedSigmaKernel>(&kernel)) j["sigma"] = f->sigma;
  if (const auto* k = std::get_if<KnnAdaptiveKernel>(&kernel)) {
    j["k"] = k->k;
    j["clip_lo"] = k->clip_lo;
    j["clip_hi"] = k->clip_hi;
    j["dispersion_floor"] = k->dispersion_floor;
  }
  if (const auto* o = std::get_if<OptimizedSigmaKernel>(&kernel)) {
    j["n_starts"] = o->search.n_starts;
    j["sigma_min"] = o->search.sigma_min;
    j["sigma_max"] = o->search.sigma_max;
    j["holdout_frac"] = o->search.holdout_frac;
    j["min_effective_n"] = o->search.min_effective_n;
  }
  return j;
}

}  // namespace

json to_json(const KrigingPreset& p) {
  json candidates = json::array();
  for (auto kind : p.candidates) candidates.push_back(std::string(to_string(kind)));
  return {{"name", p.name},
          {"candidates", candidates},
          {"loss", std::string(to_string(p.loss))},
          {"n_starts", p.n_starts},
          {"smart_start", p.smart_start},
          {"criterion", std::string(to_string(p.criterion))},
          {"exponent_grid", p.exponent_grid},
          {"binning", binning_json(p.binning)},
          {"solver",
           {{"mode", std::string(to_string(p.solver.mode))},
            {"neighbors", p.solver.neighbors},
            {"regularization", std::string(to_string(p.solver.regularization))},
            {"fixed_epsilon", p.solver.fixed_epsilon},
            {"fallback", std::string(to_string(p.solver.fallback))}}},
          {"log_transform", p.log_transform}};
}

json to_json(const GeoCPPreset& p) {
  return {{"name", p.name},
          {"kernel", kernel_json(p.kernel)},
          {"method", std::string(to_string(p.method))},
          {"level_rule", std::string(to_string(p.level_rule))},
          {"metrics", p.metrics == MetricSet::Full ? "full" : "interval_score_only"}};
}

void apply_overrides(KrigingPreset& p, const json& j) {
  if (!j.is_object()) throw InvalidArgument("kriging config must be a JSON object");
  read(j, "name", p.name);
  if (j.contains("candidates")) {
    if (!j.at("candidates").is_array())
      throw InvalidArgument("config field 'candidates' must be an array");
    p.candidates.clear();
    for (const auto& c : j.at("candidates")) {
      if (!c.is_string()) throw InvalidArgument("candidate names must be strings");
      p.candidates.push_back(parse_variogram_kind(c.get<std::string>()));
    }
  }
  read_enum(j, "loss", p.loss, parse_loss);
  read(j, "n_starts", p.n_starts);
  read(j, "smart_start", p.smart_start);
  read_enum(j, "criterion", p.criterion, parse_criterion);
  read(j, "exponent_grid", p.exponent_grid);
  read(j, "log_transform", p.log_transform);

  if (j.contains("binning")) {
    const auto& b = j.at("binning");
    if (!b.is_object()) throw InvalidArgument("config field 'binning' must be an object");
    if (b.contains("type")) {
      const auto type = b.at("type").get<std::string>();
      if (type == "fixed" && !std::holds_alternative<FixedBinning>(p.binning))
        p.binning = FixedBinning{};
      else if (type == "adaptive" && !std::holds_alternative<AdaptiveBinning>(p.binning))
        p.binning = AdaptiveBinning{};
      else if (type != "fixed" && type != "adaptive")
        throw InvalidArgument("unknown binning type '" + type + "'");
    }
    if (auto* f = std::get_if<FixedBinning>(&p.binning)) {
      read(b, "n_lags", f->n_lags);
      read(b, "truncate_frac", f->truncate_frac);
      read(b, "include_zero", f->include_zero);
      read(b, "min_pairs", f->min_pairs);
    } else {
      auto& a = std::get<AdaptiveBinning>(p.binning);
      read_enum(b, "mode", a.mode, [](const std::string& s) {
        if (s == "silverman") return AdaptiveMode::Silverman;
        if (s == "quantile") return AdaptiveMode::Quantile;
        throw InvalidArgument("unknown adaptive binning mode '" + s + "'");
      });
      read(b, "trim_frac", a.trim_frac);
      read(b, "min_pairs", a.min_pairs);
      read(b, "max_lag_frac", a.max_lag_frac);
    }
  }

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    if (!s.is_object()) throw InvalidArgument("config field 'solver' must be an object");
    read_enum(s, "mode", p.solver.mode, parse_solver_mode);
    read(s, "neighbors", p.solver.neighbors);
    read_enum(s, "regularization", p.solver.regularization, parse_regularization);
    read(s, "fixed_epsilon", p.solver.fixed_epsilon);
    read_enum(s, "fallback", p.solver.fallback, parse_fallback);
  }
}

void apply_overrides(GeoCPPreset& p, const json& j) {
  if (!j.is_object()) throw InvalidArgument("geocp config must be a JSON object");
  read(j, "name", p.name);
  read_enum(j, "method", p.method, parse_quantile_method);
  read_enum(j, "level_rule", p.level_rule, parse_level_rule);
  read_enum(j, "metrics", p.metrics, [](const std::string& s) {
    if (s == "full") return MetricSet::Full;
    if (s == "interval_score_only") return MetricSet::IntervalScoreOnly;
    throw InvalidArgument("unknown metric set '" + s + "'");
  });

  if (j.contains("kernel")) {
    const auto& k = j.at("kernel");
    if (!k.is_object()) throw InvalidArgument("config field 'kernel' must be an object");
    std::string type(kernel_name(p.kernel));
    read(k, "type", type);
    if (type != kernel_name(p.kernel)) {
      if (type == "fixed_legacy") p.kernel = FixedLegacyKernel{};
      else if (type == "uniform") p.kernel = UniformKernel{};
      else if (type == "fixed_sigma") p.kernel = FixedSigmaKernel{};
      else if (type == "knn_adaptive") p.kernel = KnnAdaptiveKernel{};
      else if (type == "optimized_sigma") p.kernel = OptimizedSigmaKernel{};
      else throw InvalidArgument("unknown kernel type '" + type + "'");
    }
    if (auto* f = std::get_if<FixedSigmaKernel>(&p.kernel)) read(k, "sigma", f->sigma);
    if (auto* a = std::get_if<KnnAdaptiveKernel>(&p.kernel)) {
      read(k, "k", a->k);
      read(k, "clip_lo", a->clip_lo);
      read(k, "clip_hi", a->clip_hi);
      read(k, "dispersion_floor", a->dispersion_floor);
    }
    if (auto* o = std::get_if<OptimizedSigmaKernel>(&p.kernel)) {
      read(k, "n_starts", o->search.n_starts);
      read(k, "sigma_min", o->search.sigma_min);
      read(k, "sigma_max", o->search.sigma_max);
      read(k, "holdout_frac", o->search.holdout_frac);
      read(k, "min_effective_n", o->search.min_effective_n);
    }
  }
}

}  // namespace geostat

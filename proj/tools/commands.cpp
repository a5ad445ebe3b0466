#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "geostat/config.hpp"
#include "geostat/data_io.hpp"
#include "geostat/errors.hpp"
#include "geostat/pipeline.hpp"
#include "geostat/presets.hpp"

namespace geostat::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kDefaultAlpha = 0.1;
constexpr std::uint64_t kDefaultSeed = 42;

// Overrides from --config. A sidecar written by an earlier run also supplies
// its preset, seed and alpha unless the command line sets them.
json load_config(RunOptions& options, bool preset_given) {
  if (!options.config) return json::object();
  std::ifstream in(*options.config);
  if (!in) throw InvalidArgument("cannot open config file '" + *options.config + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("config file '" + *options.config + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config file must hold a JSON object");
  if (!j.contains("config")) return j;

  if (!preset_given && j.contains("preset")) options.preset = j.at("preset").get<std::string>();
  if (!options.seed && j.contains("seed")) options.seed = j.at("seed").get<std::uint64_t>();
  if (!options.alpha && j.contains("alpha") && j.at("alpha").is_number())
    options.alpha = j.at("alpha").get<double>();
  return j.at("config");
}

double checked_alpha(const RunOptions& options) {
  const double alpha = options.alpha.value_or(kDefaultAlpha);
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgument("--alpha must lie in (0, 1), got " + format_double(alpha));
  return alpha;
}

Dataset load(const RunOptions& options) {
  if (options.input.empty()) throw InvalidArgument("--input is required");
  ColumnMapping columns{options.x_col, options.y_col, options.value_col, options.feature_cols,
                        options.prediction_col};
  return read_points_csv(options.input, columns);
}

fs::path sidecar_path(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".json");
  if (p == out) p += ".json";
  return p;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

json columns_json(const RunOptions& o) {
  json j{{"x", o.x_col}, {"y", o.y_col}, {"value", o.value_col}, {"features", o.feature_cols}};
  if (o.prediction_col) j["prediction"] = *o.prediction_col;
  return j;
}

// NaN is not representable in JSON; it is written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json regression_json(const RegressionMetrics& m) {
  return {{"rmse", number(m.rmse)},
          {"mae", number(m.mae)},
          {"r2", number(m.r2)},
          {"r2_degenerate", m.r2_degenerate}};
}

json interval_json(const IntervalMetrics& m, MetricSet set) {
  if (set == MetricSet::IntervalScoreOnly) return {{"mean_interval_score", m.mean_interval_score}};
  return {{"mean_interval_score", m.mean_interval_score},
          {"mean_interval_size", m.mean_interval_size},
          {"empirical_coverage", m.empirical_coverage},
          {"coverage_deviation", m.coverage_deviation}};
}

json variogram_json(const KrigingFit& fit) {
  const auto& s = fit.report.spec;
  return {{"kind", std::string(to_string(s.kind()))},
          {"nugget", s.nugget()},
          {"partial_sill", s.partial_sill()},
          {"range", s.range()},
          {"exponent", s.exponent()},
          {"loss", fit.report.loss_value},
          {"aic", fit.report.aic},
          {"bic", fit.report.bic},
          {"parameters", fit.report.parameter_count},
          {"bins", fit.empirical.size()}};
}

KrigingPreset effective_kriging(RunOptions& options, bool preset_given) {
  const json overrides = load_config(options, preset_given);
  auto preset = kriging_preset(options.preset);
  apply_overrides(preset, overrides);
  return preset;
}

GeoCPPreset effective_geocp(RunOptions& options, bool preset_given) {
  const json overrides = load_config(options, preset_given);
  auto preset = geocp_preset(options.preset);
  apply_overrides(preset, overrides);
  return preset;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void cmd_krige(RunOptions options) {
  const bool preset_given = !options.preset.empty();
  if (!preset_given) options.preset = "geoevolve";
  const auto preset = effective_kriging(options, preset_given);
  const std::uint64_t seed = options.seed.value_or(kDefaultSeed);
  if (options.out.empty()) throw InvalidArgument("--out is required");

  const auto data = load(options);
  const auto split = split_811(data.size(), seed);
  const auto ev = evaluate_kriging(preset, data, split, seed);

  Table table{{"x", "y", "prediction", "variance", "used_fallback"}, {}};
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    const auto& p = ev.test_predictions[i];
    const auto& c = data.coords[split.test[i]];
    table.rows.push_back({c.x, c.y, p.value, p.variance, p.used_fallback ? 1.0 : 0.0});
  }
  write_results_csv(options.out, table);

  json meta{{"command", "krige"},
            {"task", "kriging"},
            {"preset", options.preset},
            {"seed", seed},
            {"input", options.input},
            {"columns", columns_json(options)},
            {"config", to_json(preset)},
            {"split", {{"train", split.train.size()}, {"validation", split.val.size()}, {"test", split.test.size()}}},
            {"variogram", variogram_json(ev.fit)},
            {"transform", {{"enabled", ev.fit.transform.enabled}, {"delta", ev.fit.transform.delta}}},
            {"variance_units", ev.fit.transform.enabled ? "log" : "value"},
            {"metrics", {{"test", regression_json(ev.test)}, {"validation", regression_json(ev.validation)}}},
            {"fallbacks", ev.summary.fallbacks},
            {"clamped_variances", ev.summary.clamped_variances}};
  write_json(sidecar_path(options.out), meta);
}

void cmd_geocp(RunOptions options) {
  const bool preset_given = !options.preset.empty();
  if (!preset_given) options.preset = "geoevolve";
  const auto preset = effective_geocp(options, preset_given);
  const double alpha = checked_alpha(options);
  const std::uint64_t seed = options.seed.value_or(kDefaultSeed);
  if (options.out.empty()) throw InvalidArgument("--out is required");

  const auto data = load(options);
  const auto split = split_811(data.size(), seed);
  const auto ev = evaluate_geocp(preset, data, split, alpha, seed, options.knn_k);

  Table table{{"x", "y", "prediction", "lower", "upper", "threshold"}, {}};
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    const auto& iv = ev.result.intervals[i];
    const auto& c = data.coords[split.test[i]];
    table.rows.push_back({c.x, c.y, iv.center, iv.lower, iv.upper, iv.threshold});
  }
  write_results_csv(options.out, table);

  json meta{{"command", "geocp"},
            {"task", "geocp"},
            {"preset", options.preset},
            {"seed", seed},
            {"alpha", alpha},
            {"input", options.input},
            {"columns", columns_json(options)},
            {"config", to_json(preset)},
            {"knn_k", options.knn_k},
            {"base_predictor", ev.base.external ? "external" : "knn"},
            {"split", {{"train", split.train.size()}, {"calibration", split.val.size()}, {"test", split.test.size()}}},
            {"metrics", interval_json(ev.metrics, preset.metrics)},
            {"degenerate_weights", ev.result.degenerate_weights}};
  if (ev.result.sigma) meta["sigma"] = *ev.result.sigma;
  write_json(sidecar_path(options.out), meta);
}

void cmd_compare(RunOptions options) {
  if (options.out.empty()) throw InvalidArgument("--out is required");
  const Task task = parse_task(options.task);
  const std::uint64_t seed = options.seed.value_or(kDefaultSeed);
  const double alpha = checked_alpha(options);
  const auto data = load(options);
  const auto split = split_811(data.size(), seed);

  std::vector<std::string> header{"preset"};
  if (task == Task::Kriging)
    header.insert(header.end(), {"rmse", "mae", "r2"});
  else
    header.insert(header.end(), {"mean_interval_size", "mean_interval_score", "empirical_coverage"});

  std::vector<std::vector<std::string>> cells;
  json rows = json::array();
  for (auto name : kPresetNames) {
    std::vector<double> values;
    json entry{{"preset", std::string(name)}};
    if (task == Task::Kriging) {
      const auto ev = evaluate_kriging(kriging_preset(name), data, split, seed);
      values = {ev.test.rmse, ev.test.mae, ev.test.r2};
      entry["config"] = to_json(kriging_preset(name));
      entry["metrics"] = regression_json(ev.test);
    } else {
      const auto ev = evaluate_geocp(geocp_preset(name), data, split, alpha, seed, options.knn_k);
      values = {ev.metrics.mean_interval_size, ev.metrics.mean_interval_score,
                ev.metrics.empirical_coverage};
      entry["config"] = to_json(geocp_preset(name));
      entry["metrics"] = interval_json(ev.metrics, MetricSet::Full);
    }
    std::vector<std::string> row{std::string(name)};
    for (double v : values) row.push_back(format_double(v));
    cells.push_back(std::move(row));
    rows.push_back(std::move(entry));
  }

  std::ofstream csv(options.out);
  if (!csv) throw IoError("cannot write '" + options.out + "'");
  for (std::size_t j = 0; j < header.size(); ++j) csv << (j ? "," : "") << header[j];
  csv << '\n';
  for (const auto& row : cells) {
    for (std::size_t j = 0; j < row.size(); ++j) csv << (j ? "," : "") << row[j];
    csv << '\n';
  }
  csv.close();
  if (!csv) throw IoError("failed writing '" + options.out + "'");

  std::vector<std::size_t> width(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
  std::vector<std::vector<std::string>> shown;
  for (const auto& row : cells) {
    std::vector<std::string> s{row[0]};
    for (std::size_t j = 1; j < row.size(); ++j) s.push_back(fixed(std::stod(row[j])));
    for (std::size_t j = 0; j < s.size(); ++j) width[j] = std::max(width[j], s[j].size());
    shown.push_back(std::move(s));
  }
  std::ostringstream text;
  for (std::size_t j = 0; j < header.size(); ++j) text << pad(header[j], width[j] + 2);
  text << '\n';
  for (const auto& s : shown) {
    for (std::size_t j = 0; j < s.size(); ++j) text << pad(s[j], width[j] + 2);
    text << '\n';
  }
  std::cout << text.str();

  json meta{{"command", "compare"},
            {"task", std::string(to_string(task))},
            {"seed", seed},
            {"input", options.input},
            {"columns", columns_json(options)},
            {"rows", rows}};
  if (task == Task::GeoCP) meta["alpha"] = alpha;
  write_json(sidecar_path(options.out), meta);
}

void cmd_synth(const SynthOptions& o) {
  if (o.out.empty()) throw InvalidArgument("--out is required");
  if (o.n < 3) throw InvalidArgument("--n must be at least 3");
  if (!(o.xmax > o.xmin) || !(o.ymax > o.ymin)) throw InvalidArgument("empty domain");
  const VariogramSpec spec(parse_variogram_kind(o.kind), o.nugget, o.sill, o.range, o.exponent);
  const auto data = synth_gaussian_field(o.n, spec, {o.xmin, o.xmax, o.ymin, o.ymax}, o.seed);

  Table table{{"x", "y", "value"}, {}};
  for (std::size_t i = 0; i < data.size(); ++i)
    table.rows.push_back({data.coords[i].x, data.coords[i].y, data.target[i]});
  write_results_csv(o.out, table);
}

}  // namespace geostat::cli

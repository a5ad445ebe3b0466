#include "geostat/pipeline.hpp"

#include "geostat/errors.hpp"

namespace geostat {

KrigingFit fit_kriging(const KrigingPreset& preset, const PointSet& train, std::uint64_t seed) {
  TransformState transform =
      preset.log_transform ? TransformState::fit_log(train.values()) : TransformState::identity();
  std::vector<double> values;
  values.reserve(train.size());
  for (double v : train.values()) values.push_back(transform.forward(v));
  const PointSet working(std::vector<Point2>(train.points().begin(), train.points().end()),
                         std::move(values));

  auto empirical = empirical_variogram(working, preset.binning);

  SelectOptions select;
  select.candidates = preset.candidates;
  select.criterion = preset.criterion;
  select.exponent_grid = preset.exponent_grid;
  select.fit.loss = preset.loss;
  select.fit.n_starts = preset.n_starts;
  select.fit.seed = seed;
  select.fit.smart_start = preset.smart_start;
  auto report = select_variogram(empirical, select);
  return {transform, std::move(empirical), std::move(report)};
}

KrigingModel make_kriging_model(const KrigingPreset& preset, const PointSet& train,
                                const KrigingFit& fit) {
  return KrigingModel(train, fit.report.spec, fit.transform, preset.solver);
}

namespace {

RegressionMetrics score(const KrigingModel& model, const Dataset& part,
                        std::vector<KrigingPrediction>* keep = nullptr) {
  const auto preds = model.predict(part.coords);
  std::vector<double> values;
  values.reserve(preds.size());
  for (const auto& p : preds) values.push_back(p.value);
  const auto m = regression_metrics(values, part.target);
  if (keep) *keep = preds;
  return m;
}

}  // namespace

KrigingEvaluation evaluate_kriging(const KrigingPreset& preset, const Dataset& data,
                                   const Split& split, std::uint64_t seed) {
  const Dataset train = data.rows(split.train);
  const PointSet train_points = train.points();
  auto fit = fit_kriging(preset, train_points, seed);
  const auto model = make_kriging_model(preset, train_points, fit);

  KrigingEvaluation ev{std::move(fit), {}, {}, {}, {}};
  ev.test = score(model, data.rows(split.test), &ev.test_predictions);
  if (!split.val.empty()) ev.validation = score(model, data.rows(split.val));
  ev.summary = summarize(ev.test_predictions);
  return ev;
}

BasePredictions base_predictions(const Dataset& data, const Split& split, std::size_t knn_k) {
  BasePredictions base;
  if (data.predictions) {
    base.external = true;
    for (auto id : split.val) base.calibration.push_back(data.predictions->at(id));
    for (auto id : split.test) base.test.push_back(data.predictions->at(id));
    return base;
  }

  auto features = [&](const std::vector<std::size_t>& ids) {
    const bool coords = data.features.cols() == 0;
    Eigen::MatrixXd f(static_cast<Eigen::Index>(ids.size()), coords ? 2 : data.features.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const auto row = static_cast<Eigen::Index>(r);
      if (coords) {
        f(row, 0) = data.coords[ids[r]].x;
        f(row, 1) = data.coords[ids[r]].y;
      } else {
        f.row(row) = data.features.row(static_cast<Eigen::Index>(ids[r]));
      }
    }
    return f;
  };
  std::vector<double> train_targets;
  for (auto id : split.train) train_targets.push_back(data.target[id]);
  const auto train_features = features(split.train);
  base.calibration = baseline_predict_knn(train_features, train_targets, features(split.val), knn_k);
  base.test = baseline_predict_knn(train_features, train_targets, features(split.test), knn_k);
  return base;
}

GeoCPConfig make_geocp_config(const GeoCPPreset& preset, double alpha, std::uint64_t seed) {
  GeoCPConfig config;
  config.kernel = preset.kernel;
  if (auto* opt = std::get_if<OptimizedSigmaKernel>(&config.kernel)) opt->search.seed = seed;
  config.method = preset.method;
  config.level_rule = preset.level_rule;
  config.alpha = alpha;
  return config;
}

GeoCPEvaluation evaluate_geocp(const GeoCPPreset& preset, const Dataset& data, const Split& split,
                               double alpha, std::uint64_t seed, std::size_t knn_k) {
  if (split.val.empty()) throw TooFewRows("calibration (validation) split is empty");
  if (split.test.empty()) throw TooFewRows("test split is empty");
  GeoCPEvaluation ev;
  ev.base = base_predictions(data, split, knn_k);

  std::vector<Point2> calib_coords, test_coords;
  std::vector<double> calib_obs, test_obs;
  for (auto id : split.val) {
    calib_coords.push_back(data.coords[id]);
    calib_obs.push_back(data.target[id]);
  }
  for (auto id : split.test) {
    test_coords.push_back(data.coords[id]);
    test_obs.push_back(data.target[id]);
  }
  ev.result = run_geocp(ev.base.calibration, calib_obs, calib_coords, ev.base.test, test_coords,
                        make_geocp_config(preset, alpha, seed));
  ev.metrics = interval_metrics(ev.result.intervals, test_obs, alpha);
  return ev;
}

}  // namespace geostat

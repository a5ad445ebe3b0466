#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "geostat/data_io.hpp"
#include "geostat/geocp.hpp"
#include "geostat/kriging.hpp"
#include "geostat/metrics.hpp"
#include "geostat/presets.hpp"

namespace geostat {

// Variogram estimated on the (optionally log-transformed) training values.
struct KrigingFit {
  TransformState transform;
  EmpiricalVariogram empirical;
  FitReport report;
};

KrigingFit fit_kriging(const KrigingPreset& preset, const PointSet& train, std::uint64_t seed);

KrigingModel make_kriging_model(const KrigingPreset& preset, const PointSet& train,
                                const KrigingFit& fit);

struct KrigingEvaluation {
  KrigingFit fit;
  std::vector<KrigingPrediction> test_predictions;
  RegressionMetrics test;
  RegressionMetrics validation;
  PredictionSummary summary;
};

// Trains on the train split, reports validation and test metrics.
KrigingEvaluation evaluate_kriging(const KrigingPreset& preset, const Dataset& data,
                                   const Split& split, std::uint64_t seed);

struct BasePredictions {
  std::vector<double> calibration;
  std::vector<double> test;
  bool external = false;
};

// External predictions when the dataset carries them, otherwise the k-NN
// regressor trained on the train split (features, or coordinates when the
// dataset has none).
BasePredictions base_predictions(const Dataset& data, const Split& split, std::size_t knn_k);

GeoCPConfig make_geocp_config(const GeoCPPreset& preset, double alpha, std::uint64_t seed);

struct GeoCPEvaluation {
  BasePredictions base;
  GeoCPResult result;
  IntervalMetrics metrics;
};

// Calibrates on the validation split and builds intervals on the test split.
GeoCPEvaluation evaluate_geocp(const GeoCPPreset& preset, const Dataset& data, const Split& split,
                               double alpha, std::uint64_t seed, std::size_t knn_k = 10);

}  // namespace geostat

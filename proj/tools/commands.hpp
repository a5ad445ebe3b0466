#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace geostat::cli {

struct RunOptions {
  std::string task;
  std::string preset;  // empty: taken from a sidecar config, else geoevolve
  std::optional<std::string> config;
  std::string input;
  std::string x_col = "x";
  std::string y_col = "y";
  std::string value_col = "value";
  std::vector<std::string> feature_cols;
  std::optional<std::string> prediction_col;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::size_t knn_k = 10;
  std::string out;
};

struct SynthOptions {
  std::size_t n = 500;
  std::string kind = "exponential";
  double nugget = 0.1;
  double sill = 1.0;  // partial sill
  double range = 0.2;
  double exponent = 1.0;
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_krige(RunOptions options);
void cmd_geocp(RunOptions options);
void cmd_compare(RunOptions options);
void cmd_synth(const SynthOptions& options);

}  // namespace geostat::cli

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geostat/spatial.hpp"
#include "geostat/variogram.hpp"

namespace geostat {

struct ColumnMapping {
  std::string x = "x";
  std::string y = "y";
  std::string value = "value";
  std::vector<std::string> features;
  std::optional<std::string> prediction;  // external base-model predictions
};

struct Dataset {
  std::vector<Point2> coords;
  std::vector<double> target;
  std::vector<std::string> feature_names;
  Eigen::MatrixXd features;  // one row per observation
  std::optional<std::vector<double>> predictions;
  std::string source;

  std::size_t size() const noexcept { return target.size(); }
  PointSet points() const { return PointSet(coords, target); }
  Dataset rows(const std::vector<std::size_t>& ids) const;
};

// Comma-separated, header row required. Data rows are numbered from 1 in
// BadCell errors. Throws FileNotFound, MissingColumn, BadCell.
Dataset read_points_csv(const std::filesystem::path& path, const ColumnMapping& columns);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

// Seeded shuffle; floor(0.8 n) train, floor(0.1 n) validation, rest test.
Split split_811(std::size_t n, std::uint64_t seed);

struct Domain {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  double diameter() const;
};

// Uniform random sites with values from a zero-mean Gaussian vector whose
// covariance is sill - gamma(d) off the diagonal and the full sill on it.
// Limited to 2000 points (dense Cholesky).
Dataset synth_gaussian_field(std::size_t n, const VariogramSpec& spec, const Domain& domain,
                             std::uint64_t seed);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// 17 significant digits, so values read back bit-identically.
std::string format_double(double v);

// Throws IoError when the file cannot be written.
void write_results_csv(const std::filesystem::path& path, const Table& table);

// Whole numeric CSV. Throws as read_points_csv.
Table read_table_csv(const std::filesystem::path& path);

}  // namespace geostat

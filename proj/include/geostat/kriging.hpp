#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "geostat/spatial.hpp"
#include "geostat/variogram.hpp"

namespace geostat {

// Offset for log(z + delta): the 1st percentile of the positive values plus
// 1e-6, raised if needed so that min(values) + delta > 0.
double adaptive_log_offset(std::span<const double> values);

struct TransformState {
  bool enabled = false;
  double delta = 0.0;

  static TransformState identity() { return {}; }
  static TransformState fit_log(std::span<const double> values) {
    return {true, adaptive_log_offset(values)};
  }

  // Throws NonPositiveAfterOffset when enabled and v + delta <= 0.
  double forward(double v) const;
  double back(double t) const;
};

enum class SolverMode { Global, Local };
enum class Regularization { None, FixedDiagonal, ConditionAdaptive };
enum class Fallback { Fail, PseudoInverse, NeighborMean };

std::string_view to_string(SolverMode mode);
std::string_view to_string(Regularization reg);
std::string_view to_string(Fallback fallback);
SolverMode parse_solver_mode(std::string_view name);
Regularization parse_regularization(std::string_view name);
Fallback parse_fallback(std::string_view name);

struct SolverPolicy {
  SolverMode mode = SolverMode::Global;
  std::size_t neighbors = 25;  // Local mode only, >= 2
  Regularization regularization = Regularization::None;
  double fixed_epsilon = 1e-10;  // FixedDiagonal only
  Fallback fallback = Fallback::Fail;

  friend bool operator==(const SolverPolicy&, const SolverPolicy&) = default;
};

// Semivariance entering the kriging system: zero at zero separation (the
// data are their own best predictor there), the model value otherwise.
inline double system_semivariance(const VariogramSpec& spec, double d) {
  return d == 0.0 ? 0.0 : spec(d);
}

// Lagrange-augmented ordinary kriging system of size m + 1.
struct KrigingSystem {
  Eigen::MatrixXd lhs;
  Eigen::VectorXd rhs;
};

KrigingSystem assemble_ok_system(const VariogramSpec& spec, std::span<const Point2> neighbors,
                                 const Point2& target);

// Piecewise diagonal loading: 1e-10 below kappa 1e8, 1e-8 below 1e10,
// 1e-6 below 1e12, else 1e-4.
double condition_adaptive_epsilon(double kappa);

// Singular-value ratio for systems up to 64 rows, LU reciprocal-condition
// estimate beyond. Infinite for singular matrices.
double estimate_condition_number(const Eigen::MatrixXd& a);

struct KrigingSolution {
  Eigen::VectorXd weights;
  double lagrange = 0.0;
  double prediction = 0.0;
  double variance = 0.0;
  double epsilon = 0.0;  // diagonal loading actually applied
  bool used_fallback = false;
  bool variance_clamped = false;
};

// Factorised system that can be solved for many right-hand sides; the global
// solver builds one per model.
class PreparedSystem {
 public:
  PreparedSystem(Eigen::MatrixXd lhs, const SolverPolicy& policy, std::span<const double> values);

  KrigingSolution solve(const Eigen::VectorXd& rhs) const;

  bool singular() const noexcept { return singular_; }
  double epsilon() const noexcept { return epsilon_; }

 private:
  KrigingSolution finish(const Eigen::VectorXd& x, const Eigen::VectorXd& rhs) const;

  Eigen::MatrixXd lhs_;
  SolverPolicy policy_;
  std::vector<double> values_;
  double epsilon_ = 0.0;
  bool singular_ = false;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> pinv_;
};

// Solves the system with the policy's regularisation and fallback. Throws
// SingularSystem only under Fallback::Fail.
KrigingSolution solve_kriging_system(const Eigen::MatrixXd& lhs, const Eigen::VectorXd& rhs,
                                     const SolverPolicy& policy,
                                     std::span<const double> neighbor_values);

struct KrigingPrediction {
  double value = 0.0;
  double variance = 0.0;  // log units when the transform is enabled
  bool used_fallback = false;
  bool variance_clamped = false;
  bool variance_in_transformed_units = false;
};

class KrigingModel {
 public:
  // The variogram must describe the (transformed) training values.
  KrigingModel(PointSet train, VariogramSpec spec, TransformState transform, SolverPolicy policy);

  const PointSet& train() const noexcept { return train_; }
  const VariogramSpec& spec() const noexcept { return spec_; }
  const TransformState& transform() const noexcept { return transform_; }
  const SolverPolicy& policy() const noexcept { return policy_; }

  // One prediction per target, in target order. Targets are processed in
  // parallel; results do not depend on the thread count.
  std::vector<KrigingPrediction> predict(std::span<const Point2> targets) const;

 private:
  KrigingPrediction predict_local(const Point2& target) const;

  PointSet train_;
  VariogramSpec spec_;
  TransformState transform_;
  SolverPolicy policy_;
  std::vector<double> transformed_;
  KnnIndex index_;
  std::optional<PreparedSystem> global_;
};

struct PredictionSummary {
  std::size_t fallbacks = 0;
  std::size_t clamped_variances = 0;
};

PredictionSummary summarize(std::span<const KrigingPrediction> predictions);

}  // namespace geostat

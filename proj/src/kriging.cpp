#include "geostat/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "geostat/errors.hpp"
#include "geostat/parallel.hpp"

namespace geostat {

double adaptive_log_offset(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("log offset needs at least one value");
  std::vector<double> positives;
  for (double v : values)
    if (v > 0.0) positives.push_back(v);

  const double min_value = *std::min_element(values.begin(), values.end());
  if (positives.empty()) return std::abs(min_value) + 1e-6;

  std::sort(positives.begin(), positives.end());
  const double pos = 0.01 * static_cast<double>(positives.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, positives.size() - 1);
  const double p01 = positives[lo] + (pos - static_cast<double>(lo)) * (positives[hi] - positives[lo]);

  double delta = p01 + 1e-6;
  if (min_value + delta <= 0.0) delta = -min_value + p01 + 1e-6;
  return delta;
}

double TransformState::forward(double v) const {
  if (!enabled) return v;
  if (!(v + delta > 0.0))
    throw NonPositiveAfterOffset("value " + std::to_string(v) + " is not positive after offset " +
                                 std::to_string(delta));
  return std::log(v + delta);
}

double TransformState::back(double t) const { return enabled ? std::exp(t) - delta : t; }

std::string_view to_string(SolverMode mode) {
  return mode == SolverMode::Global ? "global" : "local";
}

std::string_view to_string(Regularization reg) {
  switch (reg) {
    case Regularization::None: return "none";
    case Regularization::FixedDiagonal: return "fixed_diagonal";
    case Regularization::ConditionAdaptive: return "condition_adaptive";
  }
  return "unknown";
}

std::string_view to_string(Fallback fallback) {
  switch (fallback) {
    case Fallback::Fail: return "fail";
    case Fallback::PseudoInverse: return "pseudo_inverse";
    case Fallback::NeighborMean: return "neighbor_mean";
  }
  return "unknown";
}

SolverMode parse_solver_mode(std::string_view name) {
  if (name == "global") return SolverMode::Global;
  if (name == "local") return SolverMode::Local;
  throw InvalidArgument("unknown solver mode '" + std::string(name) + "'");
}

Regularization parse_regularization(std::string_view name) {
  for (auto r : {Regularization::None, Regularization::FixedDiagonal,
                 Regularization::ConditionAdaptive})
    if (to_string(r) == name) return r;
  throw InvalidArgument("unknown regularization '" + std::string(name) + "'");
}

Fallback parse_fallback(std::string_view name) {
  for (auto f : {Fallback::Fail, Fallback::PseudoInverse, Fallback::NeighborMean})
    if (to_string(f) == name) return f;
  throw InvalidArgument("unknown fallback '" + std::string(name) + "'");
}

KrigingSystem assemble_ok_system(const VariogramSpec& spec, std::span<const Point2> neighbors,
                                 const Point2& target) {
  const auto m = static_cast<Eigen::Index>(neighbors.size());
  if (m < 1) throw InvalidArgument("kriging system needs at least one neighbour");
  KrigingSystem sys{Eigen::MatrixXd::Zero(m + 1, m + 1), Eigen::VectorXd::Zero(m + 1)};
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      sys.lhs(i, j) = sys.lhs(j, i) = system_semivariance(spec, distance(neighbors[i], neighbors[j]));
    }
    sys.lhs(i, m) = sys.lhs(m, i) = 1.0;
    sys.rhs(i) = system_semivariance(spec, distance(neighbors[i], target));
  }
  sys.rhs(m) = 1.0;
  return sys;
}

double condition_adaptive_epsilon(double kappa) {
  if (kappa < 1e8) return 1e-10;
  if (kappa < 1e10) return 1e-8;
  if (kappa < 1e12) return 1e-6;
  return 1e-4;
}

double estimate_condition_number(const Eigen::MatrixXd& a) {
  if (a.rows() <= 64) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    const double smallest = s(s.size() - 1);
    return smallest > 0.0 ? s(0) / smallest : std::numeric_limits<double>::infinity();
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  return rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
}

namespace {

// Coincident points (zero off-diagonal semivariance) carrying different
// values cannot both be honoured by an exact interpolator.
bool has_conflicting_duplicates(const Eigen::MatrixXd& lhs, std::span<const double> values) {
  const auto m = lhs.rows() - 1;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      if (lhs(i, j) == 0.0 && values[i] != values[j]) return true;
  return false;
}

}  // namespace

PreparedSystem::PreparedSystem(Eigen::MatrixXd lhs, const SolverPolicy& policy,
                               std::span<const double> values)
    : lhs_(std::move(lhs)), policy_(policy), values_(values.begin(), values.end()) {
  const auto m = lhs_.rows() - 1;
  if (lhs_.rows() != lhs_.cols() || m < 1 || static_cast<std::size_t>(m) != values_.size())
    throw InvalidArgument("kriging system and neighbour values are not conformal");

  switch (policy_.regularization) {
    case Regularization::None: break;
    case Regularization::FixedDiagonal: epsilon_ = policy_.fixed_epsilon; break;
    case Regularization::ConditionAdaptive:
      epsilon_ = condition_adaptive_epsilon(estimate_condition_number(lhs_));
      break;
  }
  for (Eigen::Index i = 0; i < m; ++i) lhs_(i, i) += epsilon_;

  singular_ = has_conflicting_duplicates(lhs_, values_);
  if (!singular_) {
    lu_.compute(lhs_);
    singular_ = !lu_.isInvertible();
  }
  if (singular_ && policy_.fallback == Fallback::PseudoInverse) pinv_.compute(lhs_);
}

KrigingSolution PreparedSystem::finish(const Eigen::VectorXd& x, const Eigen::VectorXd& rhs) const {
  const auto m = x.size() - 1;
  KrigingSolution out;
  out.weights = x.head(m);
  out.lagrange = x(m);
  out.epsilon = epsilon_;
  for (Eigen::Index i = 0; i < m; ++i) out.prediction += out.weights(i) * values_[i];
  out.variance = rhs.head(m).dot(out.weights) + out.lagrange;
  if (out.variance < 0.0) {
    out.variance = 0.0;
    out.variance_clamped = true;
  }
  return out;
}

KrigingSolution PreparedSystem::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != lhs_.rows()) throw InvalidArgument("kriging right-hand side has wrong size");
  if (!singular_) {
    Eigen::VectorXd x = lu_.solve(rhs);
    if (x.allFinite()) return finish(x, rhs);
  }

  switch (policy_.fallback) {
    case Fallback::Fail: throw SingularSystem("kriging system is singular");
    case Fallback::PseudoInverse: {
      Eigen::VectorXd x;
      if (singular_) {
        x = pinv_.solve(rhs);
      } else {
        x = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(lhs_).solve(rhs);
      }
      if (x.allFinite()) {
        auto out = finish(x, rhs);
        out.used_fallback = true;
        return out;
      }
      throw SingularSystem("pseudo-inverse solve produced non-finite weights");
    }
    case Fallback::NeighborMean: {
      KrigingSolution out;
      const double n = static_cast<double>(values_.size());
      const double mean = std::accumulate(values_.begin(), values_.end(), 0.0) / n;
      double ss = 0.0;
      for (double v : values_) ss += (v - mean) * (v - mean);
      out.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(values_.size()), 1.0 / n);
      out.prediction = mean;
      out.variance = values_.size() > 1 ? ss / (n - 1.0) : 0.0;
      out.epsilon = epsilon_;
      out.used_fallback = true;
      return out;
    }
  }
  throw SingularSystem("kriging system is singular");
}

KrigingSolution solve_kriging_system(const Eigen::MatrixXd& lhs, const Eigen::VectorXd& rhs,
                                     const SolverPolicy& policy,
                                     std::span<const double> neighbor_values) {
  return PreparedSystem(lhs, policy, neighbor_values).solve(rhs);
}

KrigingModel::KrigingModel(PointSet train, VariogramSpec spec, TransformState transform,
                           SolverPolicy policy)
    : train_(std::move(train)),
      spec_(spec),
      transform_(transform),
      policy_(policy),
      index_(train_.points()) {
  if (policy_.mode == SolverMode::Local && policy_.neighbors < 2)
    throw InvalidArgument("local kriging needs at least 2 neighbours");
  transformed_.reserve(train_.size());
  for (double v : train_.values()) transformed_.push_back(transform_.forward(v));

  if (policy_.mode == SolverMode::Global) {
    // The left-hand side does not depend on the target.
    auto sys = assemble_ok_system(spec_, train_.points(), train_.point(0));
    global_.emplace(std::move(sys.lhs), policy_, transformed_);
  }
}

KrigingPrediction KrigingModel::predict_local(const Point2& target) const {
  const auto neighbors = index_.query(target, policy_.neighbors);
  std::vector<Point2> pts;
  std::vector<double> vals;
  pts.reserve(neighbors.size());
  vals.reserve(neighbors.size());
  for (const auto& nb : neighbors) {
    pts.push_back(train_.point(nb.id));
    vals.push_back(transformed_[nb.id]);
  }
  auto sys = assemble_ok_system(spec_, pts, target);
  const auto sol = PreparedSystem(std::move(sys.lhs), policy_, vals).solve(sys.rhs);
  return {transform_.back(sol.prediction), sol.variance, sol.used_fallback, sol.variance_clamped,
          transform_.enabled};
}

std::vector<KrigingPrediction> KrigingModel::predict(std::span<const Point2> targets) const {
  std::vector<KrigingPrediction> out(targets.size());
  const auto pts = train_.points();
  parallel_for(targets.size(), [&](std::size_t t) {
    if (global_) {
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(pts.size()) + 1);
      for (std::size_t i = 0; i < pts.size(); ++i)
        rhs(static_cast<Eigen::Index>(i)) = system_semivariance(spec_, distance(pts[i], targets[t]));
      rhs(rhs.size() - 1) = 1.0;
      const auto sol = global_->solve(rhs);
      out[t] = {transform_.back(sol.prediction), sol.variance, sol.used_fallback,
                sol.variance_clamped, transform_.enabled};
    } else {
      out[t] = predict_local(targets[t]);
    }
  });
  return out;
}

PredictionSummary summarize(std::span<const KrigingPrediction> predictions) {
  PredictionSummary s;
  for (const auto& p : predictions) {
    s.fallbacks += p.used_fallback ? 1 : 0;
    s.clamped_variances += p.variance_clamped ? 1 : 0;
  }
  return s;
}

}  // namespace geostat

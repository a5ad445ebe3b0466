#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace geostat {

// Planar coordinate in projected units (e.g. UTM meters).
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

double distance(const Point2& a, const Point2& b);

// Locations with one scalar observation each. Point ids are the positions in
// construction order.
class PointSet {
 public:
  // Throws InvalidPointSet when empty, mismatched, or non-finite.
  PointSet(std::vector<Point2> points, std::vector<double> values);

  std::size_t size() const noexcept { return points_.size(); }
  std::span<const Point2> points() const noexcept { return points_; }
  std::span<const double> values() const noexcept { return values_; }
  const Point2& point(std::size_t id) const { return points_[id]; }
  double value(std::size_t id) const { return values_[id]; }

  // True when two or more points share exact coordinates.
  bool has_duplicate_coordinates() const noexcept { return has_duplicates_; }

  // Rows picked by id, in the given order.
  PointSet subset(std::span<const std::size_t> ids) const;

 private:
  std::vector<Point2> points_;
  std::vector<double> values_;
  bool has_duplicates_ = false;
};

// Symmetric Euclidean distance matrix with an exactly zero diagonal.
Eigen::MatrixXd pairwise_distances(std::span<const Point2> points);
Eigen::MatrixXd pairwise_distances(const PointSet& ps);

struct Neighbor {
  std::size_t id = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Exact k-nearest-neighbour index (2-d tree). Results are ordered by
// ascending distance with ties broken by ascending point id, which makes the
// output identical to a brute-force scan. Immutable after construction, so
// concurrent queries are safe.
class KnnIndex {
 public:
  explicit KnnIndex(std::span<const Point2> points);
  explicit KnnIndex(const PointSet& ps) : KnnIndex(ps.points()) {}

  std::size_t size() const noexcept { return points_.size(); }

  // min(k, size()) neighbours. k must be at least 1.
  std::vector<Neighbor> query(const Point2& q, std::size_t k) const;

 private:
  struct Node {
    std::size_t point = 0;  // index into points_
    int axis = 0;
    int left = -1;
    int right = -1;
  };

  int build(std::span<std::size_t> ids, int depth);

  std::vector<Point2> points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

// Reference O(n log n) scan with the same ordering rule as KnnIndex.
std::vector<Neighbor> brute_force_knn(std::span<const Point2> points, const Point2& q,
                                      std::size_t k);

}  // namespace geostat

#include "geostat/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <utility>

#include "geostat/errors.hpp"

namespace geostat {

double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

double squared_distance(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Neighbour ordering key: squared distance, then id.
struct Candidate {
  double d2;
  std::size_t id;
  bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && id < o.id); }
};

std::vector<Neighbor> to_neighbors(std::vector<Candidate> found) {
  std::sort(found.begin(), found.end());
  std::vector<Neighbor> out;
  out.reserve(found.size());
  for (const auto& c : found) out.push_back({c.id, std::sqrt(c.d2)});
  return out;
}

}  // namespace

PointSet::PointSet(std::vector<Point2> points, std::vector<double> values)
    : points_(std::move(points)), values_(std::move(values)) {
  if (points_.empty()) throw InvalidPointSet("point set is empty");
  if (points_.size() != values_.size())
    throw InvalidPointSet("point set has " + std::to_string(points_.size()) + " points but " +
                          std::to_string(values_.size()) + " values");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y))
      throw InvalidPointSet("non-finite coordinate at point " + std::to_string(i));
    if (!std::isfinite(values_[i]))
      throw InvalidPointSet("non-finite value at point " + std::to_string(i));
  }

  std::vector<Point2> sorted = points_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  has_duplicates_ = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

PointSet PointSet::subset(std::span<const std::size_t> ids) const {
  std::vector<Point2> pts;
  std::vector<double> vals;
  pts.reserve(ids.size());
  vals.reserve(ids.size());
  for (auto id : ids) {
    pts.push_back(points_.at(id));
    vals.push_back(values_.at(id));
  }
  return PointSet(std::move(pts), std::move(vals));
}

Eigen::MatrixXd pairwise_distances(std::span<const Point2> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = distance(points[i], points[j]);
    }
  }
  return d;
}

Eigen::MatrixXd pairwise_distances(const PointSet& ps) { return pairwise_distances(ps.points()); }

KnnIndex::KnnIndex(std::span<const Point2> points) : points_(points.begin(), points.end()) {
  std::vector<std::size_t> ids(points_.size());
  std::iota(ids.begin(), ids.end(), 0);
  nodes_.reserve(points_.size());
  root_ = build(ids, 0);
}

int KnnIndex::build(std::span<std::size_t> ids, int depth) {
  if (ids.empty()) return -1;
  const int axis = depth % 2;
  const auto mid = ids.size() / 2;
  std::nth_element(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(mid), ids.end(),
                   [&](std::size_t a, std::size_t b) {
                     const double ka = axis == 0 ? points_[a].x : points_[a].y;
                     const double kb = axis == 0 ? points_[b].x : points_[b].y;
                     return ka < kb || (ka == kb && a < b);
                   });
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back({ids[mid], axis, -1, -1});
  const int left = build(ids.first(mid), depth + 1);
  const int right = build(ids.subspan(mid + 1), depth + 1);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

std::vector<Neighbor> KnnIndex::query(const Point2& q, std::size_t k) const {
  if (k == 0) throw InvalidArgument("knn query needs k >= 1");
  k = std::min(k, points_.size());

  // Max-heap of the best k so far; top() is the current worst.
  std::priority_queue<Candidate> best;
  auto visit = [&](auto&& self, int node_index) -> void {
    if (node_index < 0) return;
    const Node& node = nodes_[node_index];
    const Point2& p = points_[node.point];
    const Candidate here{squared_distance(p, q), node.point};
    if (best.size() < k) {
      best.push(here);
    } else if (here < best.top()) {
      best.pop();
      best.push(here);
    }

    const double delta = node.axis == 0 ? q.x - p.x : q.y - p.y;
    const int near = delta < 0 ? node.left : node.right;
    const int far = delta < 0 ? node.right : node.left;
    self(self, near);
    // Equal plane distance may still hide a lower-id tie, so only prune on
    // strictly greater.
    if (best.size() < k || delta * delta <= best.top().d2) self(self, far);
  };
  visit(visit, root_);

  std::vector<Candidate> found;
  found.reserve(best.size());
  while (!best.empty()) {
    found.push_back(best.top());
    best.pop();
  }
  return to_neighbors(std::move(found));
}

std::vector<Neighbor> brute_force_knn(std::span<const Point2> points, const Point2& q,
                                      std::size_t k) {
  if (k == 0) throw InvalidArgument("knn query needs k >= 1");
  std::vector<Candidate> all;
  all.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) all.push_back({squared_distance(points[i], q), i});
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  all.resize(k);
  return to_neighbors(std::move(all));
}

}  // namespace geostat

#include <doctest.h>

#include <cmath>
#include <limits>

#include "geostat/errors.hpp"
#include "geostat/random.hpp"
#include "geostat/spatial.hpp"

using namespace geostat;

TEST_CASE("pairwise distances") {
  SUBCASE("3-4-5 triangle") {
    const PointSet ps({{0, 0}, {3, 4}}, {1, 2});
    const auto d = pairwise_distances(ps);
    CHECK(d(0, 1) == 5.0);
    CHECK(d(1, 0) == 5.0);
    CHECK(d(0, 0) == 0.0);
  }
  SUBCASE("single point") {
    const PointSet ps({{2, 2}}, {1});
    const auto d = pairwise_distances(ps);
    CHECK(d.rows() == 1);
    CHECK(d(0, 0) == 0.0);
  }
  SUBCASE("collinear") {
    const PointSet ps({{0, 0}, {1, 0}, {2, 0}}, {0, 0, 0});
    const auto d = pairwise_distances(ps);
    CHECK(d(0, 1) == 1.0);
    CHECK(d(1, 2) == 1.0);
    CHECK(d(0, 2) == 2.0);
  }
}

TEST_CASE("pairwise distances obey the triangle inequality") {
  Rng rng(11);
  std::vector<Point2> pts;
  for (int i = 0; i < 60; ++i) pts.push_back({rng.uniform(-50, 50), rng.uniform(-50, 50)});
  const auto d = pairwise_distances(pts);
  for (int i = 0; i < 60; ++i)
    for (int j = 0; j < 60; ++j) {
      CHECK(d(i, j) == d(j, i));
      for (int k = 0; k < 60; k += 7) CHECK(d(i, j) <= d(i, k) + d(k, j) + 1e-9);
    }
}

TEST_CASE("point set validation") {
  CHECK_THROWS_AS(PointSet({}, {}), InvalidPointSet);
  CHECK_THROWS_AS(PointSet({{0, 0}}, {1, 2}), InvalidPointSet);
  CHECK_THROWS_AS(PointSet({{0, std::nan("")}}, {1}), InvalidPointSet);
  CHECK_THROWS_AS(PointSet({{0, 0}}, {std::numeric_limits<double>::infinity()}), InvalidPointSet);
  CHECK_FALSE(PointSet({{0, 0}, {1, 0}}, {1, 2}).has_duplicate_coordinates());
  CHECK(PointSet({{0, 0}, {1, 0}, {0, 0}}, {1, 2, 3}).has_duplicate_coordinates());
}

TEST_CASE("knn query examples") {
  const std::vector<Point2> line{{0, 0}, {1, 0}, {2, 0}};
  const KnnIndex index(line);

  SUBCASE("query on an indexed point") {
    const auto nn = index.query({1, 0}, 1);
    REQUIRE(nn.size() == 1);
    CHECK(nn[0].id == 1);
    CHECK(nn[0].distance == 0.0);
  }
  SUBCASE("two nearest") {
    const auto nn = index.query({0.9, 0}, 2);
    REQUIRE(nn.size() == 2);
    CHECK(nn[0].id == 1);
    CHECK(nn[0].distance == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(nn[1].id == 0);
    CHECK(nn[1].distance == doctest::Approx(0.9).epsilon(1e-12));
  }
  SUBCASE("tie goes to the lower id") {
    const KnnIndex pair(std::vector<Point2>{{1, 0}, {-1, 0}});
    CHECK(pair.query({0, 0}, 1)[0].id == 0);
    const KnnIndex flipped(std::vector<Point2>{{-1, 0}, {1, 0}});
    CHECK(flipped.query({0, 0}, 1)[0].id == 0);
  }
  SUBCASE("k larger than n returns everything") {
    CHECK(index.query({5, 5}, 10).size() == 3);
  }
  SUBCASE("k = 0 is rejected") { CHECK_THROWS_AS(index.query({0, 0}, 0), InvalidArgument); }
}

TEST_CASE("knn index matches brute force on random sets") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const auto n = 1 + static_cast<std::size_t>(rng.below(500));
    std::vector<Point2> pts;
    // Integer grid coordinates produce many exact distance ties.
    const bool lattice = trial % 3 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (lattice)
        pts.push_back({static_cast<double>(rng.below(12)), static_cast<double>(rng.below(12))});
      else
        pts.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
    }
    const KnnIndex index(pts);
    for (int q = 0; q < 20; ++q) {
      const Point2 target = lattice ? Point2{static_cast<double>(rng.below(12)),
                                             static_cast<double>(rng.below(12))}
                                    : Point2{rng.uniform(-10, 110), rng.uniform(-10, 110)};
      const auto k = 1 + static_cast<std::size_t>(rng.below(40));
      REQUIRE(index.query(target, k) == brute_force_knn(pts, target, k));
    }
  }
}

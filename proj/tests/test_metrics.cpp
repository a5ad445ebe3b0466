#include <doctest.h>

#include <cmath>

#include "geostat/errors.hpp"
#include "geostat/metrics.hpp"
#include "geostat/random.hpp"

using namespace geostat;

TEST_CASE("regression metrics") {
  const std::vector<double> a{1, 2, 3, 5};
  const auto perfect = regression_metrics(a, a);
  CHECK(perfect.rmse == 0.0);
  CHECK(perfect.mae == 0.0);
  CHECK(perfect.r2 == 1.0);

  const std::vector<double> pred{0, 0};
  const std::vector<double> obs{3, 4};
  const auto m = regression_metrics(pred, obs);
  CHECK(m.rmse == doctest::Approx(3.5355339059327378).epsilon(1e-15));
  CHECK(m.mae == 3.5);

  const std::vector<double> flat{2, 2, 2};
  const auto same = regression_metrics(flat, flat);
  CHECK(same.r2_degenerate);
  CHECK(same.r2 == 0.0);
  const std::vector<double> off{1, 2, 3};
  const auto bad = regression_metrics(off, flat);
  CHECK(bad.r2_degenerate);
  CHECK(std::isnan(bad.r2));

  CHECK_THROWS_AS(regression_metrics(pred, a), LengthMismatch);
  CHECK_THROWS_AS(regression_metrics(std::vector<double>{}, std::vector<double>{}), LengthMismatch);

  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> p(10), o(10);
    for (int i = 0; i < 10; ++i) {
      p[i] = rng.normal();
      o[i] = rng.normal();
    }
    const auto r = regression_metrics(p, o);
    CHECK(r.rmse >= r.mae);
    CHECK(r.mae >= 0.0);
    CHECK(r.r2 <= 1.0);
  }
}

TEST_CASE("interval score") {
  CHECK(std::abs(interval_score(0, 2, 1, 0.1) - 2.0) <= 1e-12);
  CHECK(std::abs(interval_score(0, 1, 2, 0.1) - 21.0) <= 1e-12);
  CHECK(std::abs(interval_score(1, 1, 1, 0.1) - 1e-6) <= 1e-12);
  CHECK(interval_score(0, 1, -1, 0.5) == doctest::Approx(5.0));
  CHECK_THROWS_AS(interval_score(2, 1, 1, 0.1), InvalidBounds);

  Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    const double lo = rng.uniform(-5, 5);
    const double hi = lo + rng.uniform(0, 3);
    const double y = rng.uniform(-10, 10);
    const double c = std::ldexp(static_cast<double>(rng.below(64)), -2);  // exact shift
    CHECK(interval_score(lo + c, hi + c, y + c, 0.1) ==
          doctest::Approx(interval_score(lo, hi, y, 0.1)).epsilon(1e-12));
    const double extra = rng.uniform(0, 2);
    CHECK(interval_score(lo, hi, hi + extra + 0.5, 0.1) >= interval_score(lo, hi, hi + extra, 0.1));
    CHECK(interval_score(lo, hi, y, 0.1) >= hi - lo);
  }
}

TEST_CASE("interval metrics") {
  std::vector<PredictionInterval> ivs{{-1, 1, 1, 0}, {4, 6, 1, 5}};
  const std::vector<double> inside{0.5, 5.0};
  const auto m = interval_metrics(ivs, inside, 0.1);
  CHECK(m.mean_interval_score == doctest::Approx(2.0));
  CHECK(m.mean_interval_size == doctest::Approx(2.0));
  CHECK(m.empirical_coverage == 1.0);
  CHECK(m.coverage_deviation == doctest::Approx(0.1));

  const std::vector<double> outside{7.0, -3.0};
  CHECK(interval_metrics(ivs, outside, 0.1).empirical_coverage == 0.0);

  std::vector<PredictionInterval> mixed{{0, 2, 1, 1}, {0, 1, 0.5, 0.5}};
  const std::vector<double> ys{1, 2};
  const auto mm = interval_metrics(mixed, ys, 0.1);
  CHECK(mm.mean_interval_score == doctest::Approx(11.5).epsilon(1e-12));
  CHECK(mm.mean_interval_score >= mm.mean_interval_size);
  CHECK(mm.empirical_coverage == 0.5);

  CHECK_THROWS_AS(interval_metrics(mixed, std::vector<double>{1}, 0.1),
                  LengthMismatch);
}

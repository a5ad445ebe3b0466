#include <doctest.h>

#include <cmath>

#include "geostat/optimize.hpp"

using namespace geostat;

TEST_CASE("nelder-mead finds an interior minimum") {
  const Box box{{-5, -5}, {5, 5}};
  auto f = [](const std::vector<double>& x) {
    return (x[0] - 1.5) * (x[0] - 1.5) + 10 * (x[1] + 0.5) * (x[1] + 0.5);
  };
  const auto r = minimize_nelder_mead(f, box, {0, 0});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("nelder-mead respects the box") {
  const Box box{{0, 0}, {1, 1}};
  auto f = [](const std::vector<double>& x) { return std::abs(x[0] + 3) + std::abs(x[1] - 4); };
  const auto r = minimize_nelder_mead(f, box, {0.5, 0.5});
  CHECK(r.x[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("degenerate box axes stay fixed") {
  const Box box{{2, -1}, {2, 1}};
  auto f = [](const std::vector<double>& x) { return x[0] * x[1] + x[1] * x[1]; };
  const auto r = minimize_nelder_mead(f, box, {2, 0.7});
  CHECK(r.x[0] == 2.0);
  CHECK(r.x[1] == doctest::Approx(-1.0).epsilon(1e-6));
}

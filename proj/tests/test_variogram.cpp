#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geostat/data_io.hpp"
#include "geostat/errors.hpp"
#include "geostat/random.hpp"
#include "geostat/variogram.hpp"

using namespace geostat;

namespace {

// Empirical variogram sampled exactly from a model at lags step, 2 step, ...
EmpiricalVariogram noiseless(const VariogramSpec& spec, std::size_t bins, double step) {
  EmpiricalVariogram emp;
  for (std::size_t k = 1; k <= bins; ++k) {
    const double h = step * static_cast<double>(k);
    emp.lag_centers.push_back(h);
    emp.gamma.push_back(spec(h));
    emp.pair_counts.push_back(10 + k);
    emp.bin_weights.push_back(static_cast<double>(10 + k));
    emp.bin_lower.push_back(h - 0.5 * step);
    emp.bin_upper.push_back(h + 0.5 * step);
  }
  return emp;
}

PointSet random_field(std::size_t n, std::uint64_t seed, bool iid) {
  Rng rng(seed);
  std::vector<Point2> pts;
  std::vector<double> vals;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({rng.uniform(0, 10), rng.uniform(0, 10)});
    vals.push_back(iid ? rng.normal() : pts.back().x + 0.3 * rng.normal());
  }
  return PointSet(std::move(pts), std::move(vals));
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("model evaluation examples") {
  const VariogramSpec expo(VariogramKind::Exponential, 0.1, 0.9, 10);
  CHECK(expo(1e9) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(expo(0.0) == doctest::Approx(0.1).epsilon(1e-15));
  const VariogramSpec gauss(VariogramKind::Gaussian, 0.1, 0.9, 10);
  CHECK(gauss(10.0) == doctest::Approx(0.6689085029457019).epsilon(1e-14));

  const VariogramSpec orig(VariogramKind::OriginalExponential, 0.0, 2.0, 0.5);
  CHECK(orig(2.0) == doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-14));
  const VariogramSpec lin(VariogramKind::Linear, 0.5, 1.0, 4.0);
  CHECK(lin(2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lin(40.0) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("invalid specs are rejected at construction") {
  CHECK_THROWS_AS(VariogramSpec(VariogramKind::Exponential, -0.1, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(VariogramSpec(VariogramKind::Exponential, 0.1, -1, 1), InvalidArgument);
  CHECK_THROWS_AS(VariogramSpec(VariogramKind::Exponential, 0.1, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(VariogramSpec(VariogramKind::PoweredExponential, 0.1, 1, 1, 2.5), InvalidArgument);
  CHECK_THROWS_AS(VariogramSpec(VariogramKind::PoweredExponential, 0.1, 1, 1, 0.0), InvalidArgument);
}

TEST_CASE("every model is monotone in the lag") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    for (auto kind : {VariogramKind::OriginalExponential, VariogramKind::Exponential,
                      VariogramKind::Gaussian, VariogramKind::Linear,
                      VariogramKind::PoweredExponential}) {
      const VariogramSpec spec(kind, rng.uniform(0, 2), rng.uniform(0, 5), rng.uniform(0.01, 20),
                               rng.uniform(0.01, 2.0));
      double prev = spec(0.0);
      for (int i = 1; i <= 1000; ++i) {
        const double g = spec(0.05 * i);
        REQUIRE(g >= prev);
        prev = g;
      }
    }
  }
}

TEST_CASE("powered exponential reproduces its special cases") {
  for (double h : {0.0, 0.3, 1.0, 2.7, 10.0, 55.0}) {
    const VariogramSpec p1(VariogramKind::PoweredExponential, 0.2, 1.3, 3.0, 1.0);
    const VariogramSpec e(VariogramKind::Exponential, 0.2, 1.3, 3.0);
    CHECK(std::abs(p1(h) - e(h)) <= 1e-12);
    const VariogramSpec p2(VariogramKind::PoweredExponential, 0.2, 1.3, 3.0, 2.0);
    const VariogramSpec g(VariogramKind::Gaussian, 0.2, 1.3, 3.0);
    CHECK(std::abs(p2(h) - g(h)) <= 1e-12);
  }
}

TEST_CASE("auto lag count") {
  CHECK(auto_n_lags(2) == 8);
  CHECK(auto_n_lags(64) == 8);
  CHECK(auto_n_lags(100) == 10);
  CHECK(auto_n_lags(900) == 20);
}

TEST_CASE("fixed-bin empirical variogram") {
  SUBCASE("constant field") {
    const auto base = random_field(40, 3, true);
    const PointSet flat(std::vector<Point2>(base.points().begin(), base.points().end()),
                        std::vector<double>(40, 7.0));
    const auto emp = empirical_variogram_fixed(flat, FixedBinning{});
    for (double g : emp.gamma) CHECK(g == 0.0);
  }
  SUBCASE("two points") {
    const PointSet two({{0, 0}, {3, 4}}, {0, 2});
    const auto emp = empirical_variogram_fixed(two, FixedBinning{});
    REQUIRE(emp.size() == 1);
    CHECK(emp.gamma[0] == 2.0);
    CHECK(emp.pair_counts[0] == 1);
    CHECK(emp.lag_centers[0] == 5.0);
    CHECK_THROWS_AS(empirical_variogram_fixed(two, FixedBinning{12, 1.0, true, 2}), AllBinsEmpty);
  }
  SUBCASE("truncation drops long pairs") {
    const PointSet line({{0, 0}, {1, 0}, {10, 0}}, {0, 1, 5});
    const auto emp = empirical_variogram_fixed(line, FixedBinning{4, 0.5, true, 1});
    REQUIRE(emp.size() == 1);
    CHECK(emp.lag_centers[0] == 1.0);
    CHECK(emp.gamma[0] == 0.5);
  }
  SUBCASE("zero-distance pairs") {
    const PointSet dup({{0, 0}, {0, 0}, {4, 0}}, {1, 3, 1});
    const auto with = empirical_variogram_fixed(dup, FixedBinning{2, 1.0, true, 1});
    const auto without = empirical_variogram_fixed(dup, FixedBinning{2, 1.0, false, 1});
    CHECK(with.pair_counts.front() == 1);
    CHECK(with.gamma.front() == 2.0);
    CHECK(without.lag_centers.front() == 4.0);
  }
}

TEST_CASE("adaptive empirical variogram") {
  const auto ps = random_field(64, 17, false);

  SUBCASE("bin count follows the sample size") {
    const auto emp = empirical_variogram_adaptive(ps, {AdaptiveMode::Silverman, 0.1, 1});
    CHECK(emp.size() == 8);
    const auto q = empirical_variogram_adaptive(ps, {AdaptiveMode::Quantile, 0.1, 1});
    CHECK(q.size() == 8);
  }

  SUBCASE("zero trim equals the plain half-mean of squared differences") {
    const auto emp = empirical_variogram_adaptive(ps, {AdaptiveMode::Quantile, 0.0, 1});
    // Independent oracle: recompute every bin from its edges.
    for (std::size_t k = 0; k < emp.size(); ++k) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
          const double d = distance(ps.point(i), ps.point(j));
          if (d >= emp.bin_lower[k] && d <= emp.bin_upper[k]) {
            sum += 0.5 * std::pow(ps.value(i) - ps.value(j), 2);
            ++count;
          }
        }
      REQUIRE(count == emp.pair_counts[k]);
      CHECK(emp.gamma[k] == doctest::Approx(sum / static_cast<double>(count)).epsilon(1e-12));
    }
  }

  SUBCASE("quantile bins hold nearly equal pair counts") {
    const auto emp = empirical_variogram_adaptive(ps, {AdaptiveMode::Quantile, 0.1, 1, 1.0});
    const std::size_t pairs = ps.size() * (ps.size() - 1) / 2;
    const std::size_t bound = (pairs + emp.size() - 1) / emp.size();
    const auto [lo, hi] = std::minmax_element(emp.pair_counts.begin(), emp.pair_counts.end());
    CHECK(*hi - *lo <= bound);
    CHECK(*hi - *lo <= 1);
    CHECK(std::accumulate(emp.pair_counts.begin(), emp.pair_counts.end(), std::size_t{0}) == pairs);
  }

  SUBCASE("bin weights are pair counts") {
    const auto emp = empirical_variogram_adaptive(ps, {});
    for (std::size_t k = 0; k < emp.size(); ++k)
      CHECK(emp.bin_weights[k] == static_cast<double>(emp.pair_counts[k]));
  }

  SUBCASE("too few points") {
    const PointSet small({{0, 0}, {1, 0}, {2, 0}}, {0, 1, 2});
    CHECK_THROWS_AS(empirical_variogram_adaptive(small, {}), InvalidArgument);
  }
}

TEST_CASE("trimmed chi-square mean") {
  CHECK(trimmed_chi2_mean(0.0) == 1.0);
  CHECK(trimmed_chi2_mean(0.05) == doctest::Approx(0.8009267054474322).epsilon(1e-9));
  CHECK(trimmed_chi2_mean(0.1) == doctest::Approx(0.7002358549579242).epsilon(1e-9));
  CHECK(trimmed_chi2_mean(0.25) == doctest::Approx(0.536092199783544).epsilon(1e-9));
}

TEST_CASE("long lags are cut from adaptive bins") {
  const auto ps = random_field(80, 12, false);
  double max_d = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j) max_d = std::max(max_d, distance(ps.point(i), ps.point(j)));
  const auto half = empirical_variogram_adaptive(ps, {AdaptiveMode::Silverman, 0.0, 1, 0.5});
  CHECK(half.bin_upper.back() <= 0.5 * max_d);
  const auto full = empirical_variogram_adaptive(ps, {AdaptiveMode::Silverman, 0.0, 1, 1.0});
  CHECK(full.bin_upper.back() == max_d);
}

TEST_CASE("trimmed estimates resist outliers") {
  auto ps = random_field(100, 8, true);
  std::vector<double> vals(ps.values().begin(), ps.values().end());
  vals[0] = 1e3;
  const PointSet spiked(std::vector<Point2>(ps.points().begin(), ps.points().end()), vals);
  const auto plain = empirical_variogram_adaptive(spiked, {AdaptiveMode::Quantile, 0.0, 1});
  const auto trimmed = empirical_variogram_adaptive(spiked, {AdaptiveMode::Quantile, 0.1, 1});
  CHECK(trimmed.max_gamma() < 0.01 * plain.max_gamma());
}

TEST_CASE("estimates on an i.i.d. field converge to the variance") {
  double fixed_ratio = 0.0, adaptive_ratio = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ps = random_field(500, 100 + seed, true);
    const auto v = ps.values();
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / 500.0;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean) / 499.0;
    auto mean_gamma = [](const EmpiricalVariogram& e) {
      return std::accumulate(e.gamma.begin(), e.gamma.end(), 0.0) / static_cast<double>(e.size());
    };
    fixed_ratio += mean_gamma(empirical_variogram_fixed(ps, {})) / var / 10.0;
    adaptive_ratio +=
        mean_gamma(empirical_variogram_adaptive(ps, {AdaptiveMode::Silverman, 0.0, 5})) / var / 10.0;
  }
  CHECK(std::abs(fixed_ratio - 1.0) <= 0.15);
  CHECK(std::abs(adaptive_ratio - 1.0) <= 0.15);
}

TEST_CASE("information criteria") {
  const std::vector<double> residuals(10, 1.0);  // RSS = 10
  const auto ic = information_criteria(residuals, 3, 10);
  CHECK(ic.aic == doctest::Approx(34.37877066409345).epsilon(1e-12));
  CHECK(ic.bic == doctest::Approx(35.28652594307559).epsilon(1e-12));

  const auto ic4 = information_criteria(residuals, 4, 10);
  CHECK(ic4.aic - ic.aic == doctest::Approx(2.0).epsilon(1e-12));

  const std::vector<double> zeros(10, 0.0);
  CHECK(std::isfinite(information_criteria(zeros, 3, 10).aic));
  CHECK_THROWS_AS(information_criteria(zeros, 11, 10), InvalidArgument);
}

TEST_CASE("fitting recovers a noiseless exponential") {
  const VariogramSpec truth(VariogramKind::Exponential, 0.1, 0.9, 6.0);
  const auto emp = noiseless(truth, 10, 2.0);
  for (auto loss : {Loss::L1, Loss::WeightedL1, Loss::L2, Loss::WLS}) {
    FitOptions options;
    options.loss = loss;
    options.n_starts = 8;
    options.seed = 3;
    const auto fit = fit_variogram(emp, VariogramKind::Exponential, options);
    CHECK(fit.converged);
    CHECK(rel_err(fit.spec.nugget(), 0.1) < 0.01);
    CHECK(rel_err(fit.spec.partial_sill(), 0.9) < 0.01);
    CHECK(rel_err(fit.spec.range(), 6.0) < 0.01);
  }
}

TEST_CASE("more starts never do worse") {
  const VariogramSpec truth(VariogramKind::Gaussian, 0.05, 2.0, 9.0);
  const auto emp = noiseless(truth, 12, 1.5);
  FitOptions one;
  one.seed = 77;
  one.n_starts = 1;
  FitOptions many = one;
  many.n_starts = 16;
  for (auto kind : {VariogramKind::Exponential, VariogramKind::Gaussian, VariogramKind::Linear}) {
    CHECK(fit_variogram(emp, kind, many).loss_value <= fit_variogram(emp, kind, one).loss_value);
  }
}

TEST_CASE("fit preconditions and failures") {
  const VariogramSpec truth(VariogramKind::Exponential, 0.1, 0.9, 6.0);
  CHECK_THROWS_AS(fit_variogram(noiseless(truth, 2, 2.0), VariogramKind::Exponential, {}),
                  FitFailed);
  CHECK_THROWS_AS(fit_variogram(noiseless(truth, 3, 2.0), VariogramKind::PoweredExponential, {}),
                  FitFailed);
  FitOptions fixed_p;
  fixed_p.fixed_exponent = 1.5;
  CHECK_NOTHROW(fit_variogram(noiseless(truth, 3, 2.0), VariogramKind::PoweredExponential, fixed_p));

  auto flat = noiseless(truth, 5, 2.0);
  std::fill(flat.gamma.begin(), flat.gamma.end(), 0.0);
  CHECK_THROWS_AS(fit_variogram(flat, VariogramKind::Exponential, {}), DegenerateVariogram);

  FitOptions bad_bounds;
  bad_bounds.bounds = Box{{0, 0}, {1, 1}};
  CHECK_THROWS_AS(fit_variogram(noiseless(truth, 5, 2.0), VariogramKind::Exponential, bad_bounds),
                  InvalidArgument);
}

TEST_CASE("fits respect bounds") {
  const VariogramSpec truth(VariogramKind::Exponential, 0.3, 1.0, 6.0);
  const auto emp = noiseless(truth, 10, 2.0);
  FitOptions options;
  options.n_starts = 4;
  options.bounds = Box{{0.0, 0.5, 1.0}, {0.1, 0.8, 3.0}};
  const auto fit = fit_variogram(emp, VariogramKind::Exponential, options);
  CHECK(fit.spec.nugget() <= 0.1);
  CHECK(fit.spec.partial_sill() >= 0.5);
  CHECK(fit.spec.partial_sill() <= 0.8);
  CHECK(fit.spec.range() <= 3.0);
}

TEST_CASE("free exponent fit recovers a powered exponential") {
  const VariogramSpec truth(VariogramKind::PoweredExponential, 0.1, 1.0, 5.0, 1.4);
  const auto emp = noiseless(truth, 12, 1.5);
  FitOptions options;
  options.n_starts = 16;
  options.loss = Loss::L2;
  const auto fit = fit_variogram(emp, VariogramKind::PoweredExponential, options);
  CHECK(fit.parameter_count == 4);
  CHECK(rel_err(fit.spec.exponent(), 1.4) < 0.01);
  CHECK(rel_err(fit.spec.range(), 5.0) < 0.01);
}

TEST_CASE("fitting is bit-reproducible for a fixed seed") {
  const auto ps = random_field(150, 4, false);
  const auto emp = empirical_variogram_adaptive(ps, {});
  FitOptions options;
  options.n_starts = 12;
  options.seed = 99;
  const auto a = fit_variogram(emp, VariogramKind::Gaussian, options);
  const auto b = fit_variogram(emp, VariogramKind::Gaussian, options);
  CHECK(a.spec == b.spec);
  CHECK(a.loss_value == b.loss_value);
}

TEST_CASE("selection") {
  SUBCASE("picks the generating gaussian") {
    const VariogramSpec truth(VariogramKind::Gaussian, 0.1, 1.0, 6.0);
    SelectOptions options;
    options.candidates = {VariogramKind::Exponential, VariogramKind::Gaussian, VariogramKind::Linear};
    options.criterion = Criterion::AIC;
    options.fit.n_starts = 8;
    CHECK(select_variogram(noiseless(truth, 12, 1.5), options).spec.kind() == VariogramKind::Gaussian);
  }
  SUBCASE("single candidate equals a direct fit") {
    const VariogramSpec truth(VariogramKind::Exponential, 0.1, 1.0, 6.0);
    const auto emp = noiseless(truth, 10, 2.0);
    SelectOptions options;
    options.candidates = {VariogramKind::Linear};
    options.fit.n_starts = 4;
    options.fit.seed = 12;
    const auto selected = select_variogram(emp, options);
    const auto direct = fit_variogram(emp, VariogramKind::Linear, options.fit);
    CHECK(selected.spec == direct.spec);
    CHECK(selected.aic == direct.aic);
  }
  SUBCASE("equal criterion goes to fewer parameters") {
    // A grid exponent of exactly 1 reproduces the exponential fit bit for bit.
    const VariogramSpec truth(VariogramKind::Linear, 0.1, 1.0, 12.0);
    const auto emp = noiseless(truth, 10, 2.0);
    SelectOptions options;
    options.candidates = {VariogramKind::PoweredExponential, VariogramKind::Exponential};
    options.exponent_grid = {1.0};
    options.criterion = Criterion::MinLoss;
    const auto best = select_variogram(emp, options);
    CHECK(best.spec.kind() == VariogramKind::Exponential);
    CHECK(best.parameter_count == 3);
  }
  SUBCASE("empty candidate list") {
    CHECK_THROWS_AS(select_variogram(noiseless(VariogramSpec(VariogramKind::Linear, 0, 1, 1), 5, 1),
                                     SelectOptions{}),
                    InvalidArgument);
  }
}

TEST_CASE("smoothness grid maps onto exponents in (0, 2]") {
  const auto grid = default_exponent_grid();
  CHECK(grid.size() == 15);
  CHECK(grid[4] == 1.0);  // nu = 1
  CHECK(grid.front() == doctest::Approx(1.0 / 3.0));
  CHECK(grid.back() == doctest::Approx(1.5));
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  CHECK(smoothness_to_exponent(100.0) < 2.0);
  CHECK(smoothness_to_exponent(1e9) <= 2.0);
}

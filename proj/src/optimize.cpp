#include "geostat/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "geostat/errors.hpp"

namespace geostat {

std::vector<double> Box::clamp(std::vector<double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  return x;
}

namespace {

using Vec = std::vector<double>;

struct Scaled {
  const Box& box;

  Vec to_unit(const Vec& x) const {
    Vec u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double width = box.upper[i] - box.lower[i];
      u[i] = width > 0 ? (x[i] - box.lower[i]) / width : 0.0;
    }
    return u;
  }

  Vec from_unit(const Vec& u) const {
    Vec x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double t = std::clamp(u[i], 0.0, 1.0);
      x[i] = box.lower[i] + t * (box.upper[i] - box.lower[i]);
    }
    return x;
  }
};

}  // namespace

MinimizeResult minimize_nelder_mead(const std::function<double(const Vec&)>& f, const Box& box,
                                    Vec start, const MinimizeOptions& options) {
  if (box.lower.size() != box.upper.size() || start.size() != box.dim())
    throw InvalidArgument("minimizer box and start point dimensions differ");
  for (std::size_t i = 0; i < box.dim(); ++i)
    if (!(box.lower[i] <= box.upper[i])) throw InvalidArgument("minimizer box has lower > upper");

  const Scaled scaled{box};
  std::vector<std::size_t> free_axes;
  for (std::size_t i = 0; i < box.dim(); ++i)
    if (box.upper[i] > box.lower[i]) free_axes.push_back(i);

  MinimizeResult result;
  auto eval = [&](const Vec& unit) {
    ++result.evaluations;
    const double v = f(scaled.from_unit(unit));
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  Vec best_unit = scaled.to_unit(box.clamp(std::move(start)));
  double best_value = eval(best_unit);
  const std::size_t n = free_axes.size();
  if (n == 0) {
    result.x = scaled.from_unit(best_unit);
    result.value = best_value;
    result.converged = std::isfinite(best_value);
    return result;
  }

  bool converged = false;
  for (std::size_t round = 0; round <= options.restarts; ++round) {
    // Initial simplex: step toward the roomier side of each free axis.
    std::vector<Vec> simplex{best_unit};
    std::vector<double> values{best_value};
    const double step = round == 0 ? 0.1 : 0.02;
    for (auto axis : free_axes) {
      Vec v = best_unit;
      v[axis] += v[axis] + step <= 1.0 ? step : -step;
      simplex.push_back(v);
      values.push_back(eval(v));
    }

    converged = false;
    std::vector<std::size_t> order(n + 1);
    while (result.evaluations < options.max_evaluations) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      const std::size_t lo = order.front(), hi = order.back(), second = order[n - 1];

      double diameter = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        for (auto axis : free_axes)
          diameter = std::max(diameter, std::abs(simplex[i][axis] - simplex[lo][axis]));
      const double spread = values[hi] - values[lo];
      if (std::isfinite(spread) &&
          spread <= options.f_tolerance * (std::abs(values[lo]) + 1e-300) + 1e-300 &&
          diameter <= options.x_tolerance) {
        converged = true;
        break;
      }
      if (diameter <= 1e-14) {
        converged = std::isfinite(values[lo]);
        break;
      }

      Vec centroid(box.dim(), 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == hi) continue;
        for (auto axis : free_axes) centroid[axis] += simplex[i][axis] / static_cast<double>(n);
      }
      auto along = [&](double t) {
        Vec v = simplex[hi];
        for (auto axis : free_axes)
          v[axis] = std::clamp(centroid[axis] + t * (simplex[hi][axis] - centroid[axis]), 0.0, 1.0);
        return v;
      };

      Vec reflected = along(-1.0);
      const double fr = eval(reflected);
      if (fr < values[lo]) {
        Vec expanded = along(-2.0);
        const double fe = eval(expanded);
        if (fe < fr) {
          simplex[hi] = std::move(expanded);
          values[hi] = fe;
        } else {
          simplex[hi] = std::move(reflected);
          values[hi] = fr;
        }
      } else if (fr < values[second]) {
        simplex[hi] = std::move(reflected);
        values[hi] = fr;
      } else {
        Vec contracted = fr < values[hi] ? along(-0.5) : along(0.5);
        const double fc = eval(contracted);
        if (fc < std::min(fr, values[hi])) {
          simplex[hi] = std::move(contracted);
          values[hi] = fc;
        } else {
          for (std::size_t i = 0; i <= n; ++i) {
            if (i == lo) continue;
            for (auto axis : free_axes)
              simplex[i][axis] = simplex[lo][axis] + 0.5 * (simplex[i][axis] - simplex[lo][axis]);
            values[i] = eval(simplex[i]);
          }
        }
      }
    }

    const auto it = std::min_element(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(it - values.begin());
    if (*it < best_value || round == 0) {
      best_value = *it;
      best_unit = simplex[idx];
    }
    if (result.evaluations >= options.max_evaluations) break;
  }

  result.x = scaled.from_unit(best_unit);
  result.value = best_value;
  result.converged = converged && std::isfinite(best_value);
  return result;
}

}  // namespace geostat

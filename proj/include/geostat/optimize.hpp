#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace geostat {

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const noexcept { return lower.size(); }
  std::vector<double> clamp(std::vector<double> x) const;
};

struct MinimizeOptions {
  std::size_t max_evaluations = 4000;
  double f_tolerance = 1e-15;  // relative spread of simplex values
  double x_tolerance = 1e-11;  // simplex diameter in unit-box coordinates
  std::size_t restarts = 2;    // fresh simplex around the incumbent
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// Derivative-free Nelder-Mead over a box. The search runs in coordinates
// scaled to [0, 1]^d and every trial point is projected onto the box, so the
// objective is only ever evaluated at feasible points. Degenerate box axes
// (lower == upper) stay fixed.
MinimizeResult minimize_nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    const Box& box, std::vector<double> start,
                                    const MinimizeOptions& options = {});

}  // namespace geostat

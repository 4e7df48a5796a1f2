#pragma once

// Classical fixed-step fourth-order Runge-Kutta over an output grid.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "cascade/model.hpp"

namespace cascade {

template <class State, class Rhs>
State rk4_step(const Rhs& rhs, double t, const State& y, double h) {
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k1));
  const State k3 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k2));
  const State k4 = rhs(t + h, State(y + h * k3));
  return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Integrates from grid.front() and calls observe(index, t, y) at every grid
/// point. Each interval is split into equal substeps no longer than max_step.
template <class State, class Rhs, class Observer>
void integrate_rk4(const Rhs& rhs, State y, const TimeGrid& grid, double max_step,
                   Observer&& observe) {
  observe(std::size_t{0}, grid[0], static_cast<const State&>(y));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t0 = grid[i - 1];
    const double span = grid[i] - t0;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / max_step - 1e-9)));
    const double h = span / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
      y = rk4_step(rhs, t0 + static_cast<double>(s) * h, y, h);
    }
    observe(i, grid[i], static_cast<const State&>(y));
  }
}

}  // namespace cascade

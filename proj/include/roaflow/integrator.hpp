#pragma once

#include <limits>

#include "roaflow/systems.hpp"
#include "roaflow/trajectory.hpp"

namespace roaflow {

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  /// Spacing of the uniform output grid.
  double dt = 0.1;
  /// Stop with converged_to_origin once a grid sample (after t = 0) is
  /// closer to the origin than this.
  double convergence_radius = 1e-6;
  /// Stop with escaped once the state norm exceeds this.
  double escape_radius = 1e3;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 20'000'000;
};

/// Integrates x' = f(x), x(0) = x0 on [0, horizon] with an adaptive
/// Dormand-Prince 5(4) pair and returns the solution resampled on the grid
/// t_k = k * dt (dense output), with f evaluated at every sample.
[[nodiscard]] Trajectory integrate(const VectorField& field, const Vector& x0, double horizon,
                                   const IntegratorOptions& options = {});

}  // namespace roaflow

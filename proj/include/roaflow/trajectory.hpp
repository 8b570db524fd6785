#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "roaflow/types.hpp"

namespace roaflow {

enum class Termination { horizon_reached, converged_to_origin, escaped };

[[nodiscard]] std::string_view to_string(Termination t);
[[nodiscard]] Termination termination_from_string(std::string_view s);

/// Samples of one solution s(t, x0). Column k of `states` is the state at
/// `times[k]`; `derivatives`, when present, holds f(s) column by column.
struct Trajectory {
  std::vector<double> times;
  Matrix states;
  std::optional<Matrix> derivatives;
  Termination termination = Termination::horizon_reached;
  // Set when the adaptive step collapsed before the escape radius was hit.
  bool step_underflow = false;
  // Escaped runs may end with one sample off the uniform grid: the first
  // accepted step past the escape radius.
  bool off_grid_tail = false;

  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(states.rows()); }
  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
  [[nodiscard]] Vector initial_state() const { return states.col(0); }
  [[nodiscard]] Vector final_state() const { return states.col(states.cols() - 1); }
  [[nodiscard]] bool has_derivatives() const noexcept { return derivatives.has_value(); }

  /// Grid spacing. Throws InputError if the samples are not uniformly spaced
  /// (relative tolerance `rel_tol`) or there are fewer than two samples.
  [[nodiscard]] double uniform_spacing(double rel_tol = 1e-8) const;

  /// Checks the structural invariants (lengths, strictly increasing times).
  void validate() const;
};

/// Keeps the samples with time <= t_end (plus a small slack).
[[nodiscard]] Trajectory truncate(const Trajectory& traj, double t_end);

/// Fills derivatives by second-order finite differences on a uniform grid.
/// Central differences inside, one-sided three-point stencils at the ends.
[[nodiscard]] Trajectory derivatives_from_samples(Trajectory traj);

// CSV with header `t,x1,...,xn[,dx1,...,dxn]`. Lines starting with '#' are
// comments; a `# termination=<value>` comment is written and read back.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
[[nodiscard]] Trajectory read_trajectory_csv(std::istream& in);
void save_trajectory(const Trajectory& traj, const std::filesystem::path& path);
[[nodiscard]] Trajectory load_trajectory(const std::filesystem::path& path);

}  // namespace roaflow

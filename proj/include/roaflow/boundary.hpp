#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roaflow/energy.hpp"

namespace roaflow {

/// Closed planar polyline, counterclockwise. The last point connects back to
/// the first.
struct BoundaryCurve {
  std::vector<Point> points;
  int iteration = 0;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

[[nodiscard]] double signed_area(const BoundaryCurve& curve);
[[nodiscard]] double perimeter(const BoundaryCurve& curve);
/// No two non-adjacent edges intersect.
[[nodiscard]] bool is_simple(const BoundaryCurve& curve);

/// `count` (>= 3) equally spaced points on a circle, counterclockwise,
/// starting at angle 0.
[[nodiscard]] BoundaryCurve circle_points(double radius, int count);

inline constexpr int kMinCurvePoints = 8;

/// Initial boundary guess: circle_points with at least kMinCurvePoints.
[[nodiscard]] BoundaryCurve init_circle(double radius, int points);

/// Unit outward normals from cyclic central-difference tangents rotated
/// clockwise. Throws GeometryError("degenerate spacing") on coincident
/// neighbours.
[[nodiscard]] std::vector<Point> outward_normals(const BoundaryCurve& curve);

struct FlowConfig {
  /// 1 gives the boundary flow z' = [1 - tanh E] n; gamma < 1 the
  /// conservative variant z' = [gamma - tanh E] n.
  double gamma = 1.0;
  double step_size = 0.02;
  int max_iters = 2000;
  /// Unset: 1e-4 * init_radius.
  std::optional<double> conv_tol;
  int points = 50;
  double init_radius = 0.1;
  int resample_every = 5;
  /// Snapshot period for the history; 0 keeps only the first and last.
  int history_every = 10;
  /// Reject moves that land on an escaped (or non-exciting) point and halve
  /// that point's step, so the curve approaches the boundary from inside.
  bool escape_guard = true;
  EnergyConfig energy{};
  int threads = 0;

  [[nodiscard]] double convergence_tolerance() const { return conv_tol.value_or(1e-4 * init_radius); }
  void validate() const;
};

/// One explicit Euler step: p_i += scale_i * step * (gamma - tanh E_i) * n_i.
/// `step_scale` defaults to 1 for every point.
[[nodiscard]] BoundaryCurve flow_step(const BoundaryCurve& curve,
                                      std::span<const ResidualEnergy> energies,
                                      const FlowConfig& cfg,
                                      std::span<const double> step_scale = {});

/// `points` samples at uniform arclength along the polygon, starting at the
/// first vertex. Throws GeometryError("curve folded") on self-intersection.
[[nodiscard]] BoundaryCurve resample_curve(const BoundaryCurve& curve, int points);

enum class FlowStatus { converged, max_iters, folded };

[[nodiscard]] std::string_view to_string(FlowStatus s);

struct FlowSnapshot {
  int iteration = 0;
  std::vector<Point> points;
  std::vector<double> speeds;
  std::vector<ResidualEnergy> energies;
};

struct FlowResult {
  BoundaryCurve final;
  std::vector<FlowSnapshot> history;
  FlowStatus status = FlowStatus::max_iters;
  int iterations = 0;
  long rejected_moves = 0;
  std::string message;
};

using EnergyFunction = std::function<ResidualEnergy(const Point&)>;

/// Evolves init_circle(cfg.init_radius, cfg.points) under the flow with the
/// given point-wise energy until the per-iteration displacement drops below
/// the tolerance, the curve folds, or max_iters is reached.
[[nodiscard]] FlowResult run_flow(const EnergyFunction& energy, const FlowConfig& cfg);

/// Same, with the residual energy of `field` against `a_ref`.
[[nodiscard]] FlowResult run_flow(const VectorField& field, const Matrix& a_ref,
                                  const FlowConfig& cfg);

}  // namespace roaflow

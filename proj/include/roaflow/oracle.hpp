#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "roaflow/boundary.hpp"
#include "roaflow/systems.hpp"

namespace roaflow {

enum class Membership { inside, outside, undecided };

[[nodiscard]] std::string_view to_string(Membership m);

struct MembershipOptions {
  double t_max = 200.0;
  double convergence_radius = 1e-6;
  double escape_radius = 1e3;
  double rtol = 1e-10;
  double atol = 1e-12;
  double dt = 0.05;
};

/// Classifies x0 by integrating it: inside if it reaches the convergence
/// ball, outside if it leaves the escape ball, else undecided.
[[nodiscard]] Membership roa_membership(const VectorField& field, const Vector& x0,
                                        const MembershipOptions& options = {});

[[nodiscard]] std::vector<Membership> roa_membership(const VectorField& field,
                                                     std::span<const Point> points,
                                                     const MembershipOptions& options,
                                                     int threads);

struct LimitCycle {
  double period = 0.0;
  /// Crossing of the section x2 = 0, x1 > 0; also the maximum of x1.
  Point section_point;
  BoundaryCurve curve;
};

/// Traces the Van der Pol (mu = 1) limit cycle: integrates the forward-time
/// field from (2, 0) for `transient`, detects the period from successive
/// crossings of the section x2 = 0, x1 > 0, and samples one period into
/// `points` counterclockwise points starting at the section.
[[nodiscard]] LimitCycle van_der_pol_limit_cycle(int points, double transient = 100.0);

[[nodiscard]] BoundaryCurve reference_limit_cycle(int points);

/// Symmetric Hausdorff distance between two closed polylines: vertices of
/// each against the segments of the other.
[[nodiscard]] double hausdorff_distance(const BoundaryCurve& a, const BoundaryCurve& b);

/// Distance from a point to a closed polyline.
[[nodiscard]] double distance_to_polyline(const Point& p, const BoundaryCurve& curve);

}  // namespace roaflow

#include "roaflow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roaflow/integrator.hpp"
#include "roaflow/parallel.hpp"

namespace roaflow {

std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::inside:
      return "inside";
    case Membership::outside:
      return "outside";
    case Membership::undecided:
      return "undecided";
  }
  return "unknown";
}

Membership roa_membership(const VectorField& field, const Vector& x0,
                          const MembershipOptions& options) {
  if (!(options.t_max > 0.0)) throw InputError("membership horizon must be positive");
  IntegratorOptions opt;
  opt.rtol = options.rtol;
  opt.atol = options.atol;
  opt.dt = options.dt;
  opt.convergence_radius = options.convergence_radius;
  opt.escape_radius = options.escape_radius;
  const Trajectory traj = integrate(field, x0, options.t_max, opt);
  switch (traj.termination) {
    case Termination::converged_to_origin:
      return Membership::inside;
    case Termination::escaped:
      return Membership::outside;
    case Termination::horizon_reached:
      break;
  }
  return Membership::undecided;
}

std::vector<Membership> roa_membership(const VectorField& field, std::span<const Point> points,
                                       const MembershipOptions& options, int threads) {
  std::vector<Membership> out(points.size(), Membership::undecided);
  parallel_for(points.size(), threads,
               [&](std::size_t i) { out[i] = roa_membership(field, Vector(points[i]), options); });
  return out;
}

namespace {

// Cubic Hermite interpolation between two samples with derivatives.
Vector hermite(const Vector& y0, const Vector& f0, const Vector& y1, const Vector& f1, double h,
               double theta) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + theta) * h * f0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * f1;
}

struct Crossing {
  double time;
  Vector state;
};

// Downward crossings of x2 = 0 with x1 > 0, refined by bisection on the
// Hermite interpolant.
std::vector<Crossing> section_crossings(const Trajectory& traj) {
  std::vector<Crossing> out;
  const Matrix& x = traj.states;
  const Matrix& f = *traj.derivatives;
  for (Eigen::Index k = 0; k + 1 < x.cols(); ++k) {
    if (!(x(1, k) > 0.0 && x(1, k + 1) <= 0.0 && x(0, k) > 0.0)) continue;
    const double h = traj.times[static_cast<std::size_t>(k + 1)] - traj.times[static_cast<std::size_t>(k)];
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Vector y = hermite(x.col(k), f.col(k), x.col(k + 1), f.col(k + 1), h, mid);
      (y[1] > 0.0 ? lo : hi) = mid;
    }
    const double theta = 0.5 * (lo + hi);
    out.push_back({traj.times[static_cast<std::size_t>(k)] + theta * h,
                   hermite(x.col(k), f.col(k), x.col(k + 1), f.col(k + 1), h, theta)});
  }
  return out;
}

}  // namespace

LimitCycle van_der_pol_limit_cycle(int points, double transient) {
  if (points < kMinCurvePoints) {
    throw InputError("reference cycle needs at least " + std::to_string(kMinCurvePoints) + " points");
  }
  const VectorField forward = van_der_pol_forward();
  IntegratorOptions opt;
  opt.rtol = 1e-11;
  opt.atol = 1e-13;
  opt.convergence_radius = 0.0;
  opt.escape_radius = 1e6;

  Vector start(2);
  start << 2.0, 0.0;
  opt.dt = 0.5;
  const Trajectory settle = integrate(forward, start, transient, opt);
  opt.dt = 1e-3;
  const Trajectory probe = integrate(forward, settle.final_state(), 20.0, opt);
  const auto crossings = section_crossings(probe);
  if (crossings.size() < 2) {
    throw NumericalError("limit cycle period detection failed: fewer than two section crossings");
  }
  LimitCycle cycle;
  cycle.period = crossings[1].time - crossings[0].time;
  if (!(cycle.period > 0.0)) throw NumericalError("limit cycle period detection failed");
  cycle.section_point = Point(crossings[0].state[0], 0.0);

  opt.dt = cycle.period / points;
  const Trajectory loop = integrate(forward, Vector(cycle.section_point),
                                    cycle.period * (points - 1) / points, opt);
  if (static_cast<int>(loop.size()) != points) {
    throw NumericalError("limit cycle sampling produced the wrong number of points");
  }
  // Forward time runs clockwise; reverse to get a counterclockwise curve.
  cycle.curve.points.reserve(static_cast<std::size_t>(points));
  cycle.curve.points.emplace_back(loop.states(0, 0), loop.states(1, 0));
  for (Eigen::Index k = loop.states.cols() - 1; k >= 1; --k) {
    cycle.curve.points.emplace_back(loop.states(0, k), loop.states(1, k));
  }
  if (!(signed_area(cycle.curve) > 0.0) || !is_simple(cycle.curve)) {
    throw NumericalError("sampled limit cycle is not a simple counterclockwise curve");
  }
  return cycle;
}

BoundaryCurve reference_limit_cycle(int points) { return van_der_pol_limit_cycle(points).curve; }

namespace {

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double u = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + u * ab)).norm();
}

double directed_hausdorff(const BoundaryCurve& from, const BoundaryCurve& to) {
  double worst = 0.0;
  for (const auto& p : from.points) worst = std::max(worst, distance_to_polyline(p, to));
  return worst;
}

}  // namespace

double distance_to_polyline(const Point& p, const BoundaryCurve& curve) {
  const auto& q = curve.points;
  if (q.empty()) throw InputError("distance to an empty curve");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.size(); ++i) {
    best = std::min(best, point_segment_distance(p, q[i], q[(i + 1) % q.size()]));
  }
  return best;
}

double hausdorff_distance(const BoundaryCurve& a, const BoundaryCurve& b) {
  if (a.points.empty() || b.points.empty()) throw InputError("Hausdorff distance of an empty curve");
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace roaflow

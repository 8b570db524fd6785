#include "roaflow/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "roaflow/parallel.hpp"

namespace roaflow {

double signed_area(const BoundaryCurve& curve) {
  const auto& p = curve.points;
  double twice = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point& a = p[i];
    const Point& b = p[(i + 1) % p.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

double perimeter(const BoundaryCurve& curve) {
  const auto& p = curve.points;
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += (p[(i + 1) % p.size()] - p[i]).norm();
  return total;
}

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

}  // namespace

bool is_simple(const BoundaryCurve& curve) {
  const auto& p = curve.points;
  const std::size_t n = p.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a1 = p[i];
    const Point& a2 = p[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (segments_intersect(a1, a2, p[j], p[(j + 1) % n])) return false;
    }
  }
  return true;
}

BoundaryCurve circle_points(double radius, int count) {
  if (!(radius > 0.0)) throw InputError("circle radius must be positive");
  if (count < 3) throw InputError("a closed curve needs at least 3 points");
  BoundaryCurve c;
  c.points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double th = 2.0 * std::numbers::pi * i / count;
    c.points.emplace_back(radius * std::cos(th), radius * std::sin(th));
  }
  return c;
}

BoundaryCurve init_circle(double radius, int points) {
  if (points < kMinCurvePoints) {
    throw InputError("boundary curve needs at least " + std::to_string(kMinCurvePoints) +
                     " points, got " + std::to_string(points));
  }
  return circle_points(radius, points);
}

std::vector<Point> outward_normals(const BoundaryCurve& curve) {
  const auto& p = curve.points;
  const std::size_t n = p.size();
  if (n < 3) throw GeometryError("degenerate spacing: fewer than 3 points");
  std::vector<Point> normals(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point t = p[(i + 1) % n] - p[(i + n - 1) % n];
    const double len = t.norm();
    if (!(len > 1e-14)) throw GeometryError("degenerate spacing at point " + std::to_string(i));
    normals[i] = Point(t.y(), -t.x()) / len;
  }
  return normals;
}

void FlowConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("gamma must lie in (0, 1]");
  if (!(step_size > 0.0)) throw InputError("flow step size must be positive");
  if (!(convergence_tolerance() > 0.0)) throw InputError("convergence tolerance must be positive");
  if (points < kMinCurvePoints) throw InputError("flow needs at least 8 curve points");
  if (!(init_radius > 0.0)) throw InputError("initial radius must be positive");
  if (max_iters < 0) throw InputError("max_iters must be non-negative");
  if (resample_every < 0 || history_every < 0) throw InputError("periods must be non-negative");
}

BoundaryCurve flow_step(const BoundaryCurve& curve, std::span<const ResidualEnergy> energies,
                        const FlowConfig& cfg, std::span<const double> step_scale) {
  if (energies.size() != curve.size()) {
    throw InputError("energies are not aligned with the curve points");
  }
  if (!step_scale.empty() && step_scale.size() != curve.size()) {
    throw InputError("step scales are not aligned with the curve points");
  }
  const auto normals = outward_normals(curve);
  BoundaryCurve next = curve;
  next.iteration = curve.iteration + 1;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double scale = step_scale.empty() ? 1.0 : step_scale[i];
    const double speed = cfg.gamma - energies[i].squashed;
    next.points[i] = curve.points[i] + scale * cfg.step_size * speed * normals[i];
    if (!next.points[i].allFinite()) {
      throw NumericalError("flow step produced a non-finite point at index " + std::to_string(i));
    }
  }
  return next;
}

BoundaryCurve resample_curve(const BoundaryCurve& curve, int points) {
  if (points < 3) throw InputError("resampling needs at least 3 points");
  if (!is_simple(curve)) throw GeometryError("curve folded");
  const auto& p = curve.points;
  const std::size_t n = p.size();
  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cumulative[i + 1] = cumulative[i] + (p[(i + 1) % n] - p[i]).norm();
  }
  const double total = cumulative[n];
  BoundaryCurve out;
  out.iteration = curve.iteration;
  out.points.reserve(static_cast<std::size_t>(points));
  std::size_t edge = 0;
  for (int k = 0; k < points; ++k) {
    const double s = total * k / points;
    while (edge + 1 < n && cumulative[edge + 1] <= s) ++edge;
    const double len = cumulative[edge + 1] - cumulative[edge];
    const double u = len > 0.0 ? (s - cumulative[edge]) / len : 0.0;
    out.points.push_back(p[edge] + u * (p[(edge + 1) % n] - p[edge]));
  }
  return out;
}

std::string_view to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::converged:
      return "converged";
    case FlowStatus::max_iters:
      return "max_iters";
    case FlowStatus::folded:
      return "folded";
  }
  return "unknown";
}

namespace {

std::vector<ResidualEnergy> evaluate_all(const EnergyFunction& energy,
                                         const std::vector<Point>& points, int threads) {
  std::vector<ResidualEnergy> out(points.size());
  std::vector<char> failed(points.size(), 0);
  parallel_for(points.size(), threads, [&](std::size_t i) {
    try {
      out[i] = energy(points[i]);
    } catch (const Error&) {
      failed[i] = 1;
      out[i].value = std::numeric_limits<double>::infinity();
      out[i].squashed = 1.0;
      out[i].status = EnergyStatus::pe_failed;
    }
  });
  if (!points.empty() && std::all_of(failed.begin(), failed.end(), [](char f) { return f != 0; })) {
    throw NumericalError("energy evaluation failed at every curve point");
  }
  return out;
}

FlowSnapshot snapshot(const BoundaryCurve& curve, const std::vector<ResidualEnergy>& energies,
                      double gamma) {
  FlowSnapshot s;
  s.iteration = curve.iteration;
  s.points = curve.points;
  s.energies = energies;
  s.speeds.reserve(energies.size());
  for (const auto& e : energies) s.speeds.push_back(gamma - e.squashed);
  return s;
}

ResidualEnergy safe_energy(const EnergyFunction& energy, const Point& x) {
  try {
    return energy(x);
  } catch (const Error&) {
    ResidualEnergy e;
    e.value = std::numeric_limits<double>::infinity();
    e.squashed = 1.0;
    e.status = EnergyStatus::pe_failed;
    return e;
  }
}

// Resampled points lie on chords of the previous polygon and can land
// outside the finite-energy set where the boundary is concave. Pull such a
// point radially toward the equilibrium until the energy is finite again;
// radial moves keep the ordering of a star-shaped curve.
void pull_back_escaped(BoundaryCurve& curve, std::vector<ResidualEnergy>& energies,
                       const EnergyFunction& energy, double tol) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (energies[i].finite()) continue;
    const Point p = curve.points[i];
    const double r = p.norm();
    if (r <= tol) continue;
    double bad = 1.0, good = 0.5;
    ResidualEnergy good_energy = safe_energy(energy, good * p);
    while (!good_energy.finite() && good * r > tol) {
      bad = good;
      good *= 0.5;
      good_energy = safe_energy(energy, good * p);
    }
    if (!good_energy.finite()) continue;
    while ((bad - good) * r > tol) {
      const double mid = 0.5 * (good + bad);
      const ResidualEnergy e = safe_energy(energy, mid * p);
      if (e.finite()) {
        good = mid;
        good_energy = e;
      } else {
        bad = mid;
      }
    }
    curve.points[i] = good * p;
    energies[i] = good_energy;
  }
}

}  // namespace

FlowResult run_flow(const EnergyFunction& energy, const FlowConfig& cfg) {
  cfg.validate();
  const int threads = resolve_thread_count(cfg.threads);
  const double tol = cfg.convergence_tolerance();

  FlowResult result;
  BoundaryCurve curve = init_circle(cfg.init_radius, cfg.points);
  std::vector<ResidualEnergy> energies = evaluate_all(energy, curve.points, threads);
  std::vector<double> scale(curve.size(), 1.0);
  result.history.push_back(snapshot(curve, energies, cfg.gamma));

  const auto resample = [&]() {
    curve = resample_curve(curve, cfg.points);
    energies = evaluate_all(energy, curve.points, threads);
    if (cfg.escape_guard) pull_back_escaped(curve, energies, energy, tol);
  };
  const auto fold = [&](std::string message) {
    result.status = FlowStatus::folded;
    result.message = std::move(message);
  };

  result.status = FlowStatus::max_iters;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    BoundaryCurve proposal;
    try {
      proposal = flow_step(curve, energies, cfg, scale);
    } catch (const GeometryError&) {
      // Coincident neighbours: redistribute and try once more.
      if (!is_simple(curve)) {
        fold("curve folded at iteration " + std::to_string(iter));
        break;
      }
      resample();
      try {
        proposal = flow_step(curve, energies, cfg, scale);
      } catch (const GeometryError& e) {
        fold(e.what());
        break;
      }
    }
    const auto proposed = evaluate_all(energy, proposal.points, threads);

    double max_move = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const double move = (proposal.points[i] - curve.points[i]).norm();
      if (cfg.escape_guard && energies[i].finite() && !proposed[i].finite() && move > 0.0) {
        // Once the largest possible move is below tolerance the point stays put.
        scale[i] *= 0.5;
        if (scale[i] * cfg.step_size < tol) scale[i] = 0.0;
        ++result.rejected_moves;
        continue;
      }
      max_move = std::max(max_move, move);
      curve.points[i] = proposal.points[i];
      energies[i] = proposed[i];
    }
    curve.iteration = iter;
    result.iterations = iter;

    if (max_move < tol) {
      result.status = FlowStatus::converged;
      break;
    }
    if (cfg.resample_every > 0 && iter % cfg.resample_every == 0) {
      if (!is_simple(curve)) {
        fold("curve folded at iteration " + std::to_string(iter));
        break;
      }
      resample();
    }
    if (cfg.history_every > 0 && iter % cfg.history_every == 0) {
      result.history.push_back(snapshot(curve, energies, cfg.gamma));
    }
  }
  if (result.history.back().iteration != curve.iteration) {
    result.history.push_back(snapshot(curve, energies, cfg.gamma));
  }
  if (result.status != FlowStatus::folded && !is_simple(curve)) {
    fold("final curve is not simple");
  }
  result.final = curve;
  return result;
}

FlowResult run_flow(const VectorField& field, const Matrix& a_ref, const FlowConfig& cfg) {
  if (field.dimension != 2) throw InputError("the boundary flow is planar; system is not 2-D");
  const EnergyConfig energy_cfg = cfg.energy;
  return run_flow(
      [&field, &a_ref, energy_cfg](const Point& z) {
        return residual_energy(field, Vector(z), a_ref, energy_cfg);
      },
      cfg);
}

}  // namespace roaflow

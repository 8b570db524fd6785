#include "roaflow/energy.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "roaflow/parallel.hpp"

namespace roaflow {

std::string_view to_string(EnergyStatus s) {
  switch (s) {
    case EnergyStatus::ok:
      return "ok";
    case EnergyStatus::escaped:
      return "escaped";
    case EnergyStatus::pe_failed:
      return "pe_failed";
  }
  return "unknown";
}

double squash(double value) {
  if (std::isnan(value) || value < 0.0) {
    throw InputError("residual energy must be non-negative");
  }
  if (std::isinf(value)) return 1.0;
  return std::tanh(value);
}

ResidualEnergy residual_energy(const VectorField& field, const Vector& x0, const Matrix& a_ref,
                               const EnergyConfig& cfg) {
  if (!x0.allFinite()) throw InputError("residual energy requested at a non-finite point");
  if (a_ref.rows() != field.dimension || a_ref.cols() != field.dimension) {
    throw InputError("reference Jacobian does not match the system dimension");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  ResidualEnergy e;
  e.horizon = cfg.horizon;

  IntegratorOptions opt = cfg.integration;
  opt.dt = cfg.dt;
  const double run_to = std::max(cfg.horizon, cfg.escape_horizon.value_or(cfg.horizon));
  const Trajectory traj = integrate(field, x0, run_to, opt);
  if (traj.termination == Termination::escaped) {
    e.value = inf;
    e.squashed = 1.0;
    e.status = EnergyStatus::escaped;
    return e;
  }
  const Trajectory window = truncate(traj, cfg.horizon);
  if (window.size() < 2) {
    e.value = inf;
    e.squashed = 1.0;
    e.status = EnergyStatus::pe_failed;
    return e;
  }
  const GramMatrices g = gram_matrices(window, cfg.rule);
  const auto pe = pe_check(g);
  if (!pe.excited) {
    e.value = inf;
    e.squashed = 1.0;
    e.status = EnergyStatus::pe_failed;
    return e;
  }
  Eigen::LLT<Matrix> llt(g.gamma2);
  const Matrix a_hat = llt.solve(g.gamma1.transpose()).transpose();
  e.value = 0.5 * (a_hat - a_ref).squaredNorm();
  if (!std::isfinite(e.value)) {
    e.value = inf;
    e.status = EnergyStatus::pe_failed;
  }
  e.squashed = squash(e.value);
  return e;
}

std::vector<Vector> probe_directions(int dimension, int probes, std::uint64_t seed) {
  if (dimension < 1 || probes < 1) throw InputError("need a positive dimension and probe count");
  std::mt19937_64 rng(seed);
  std::vector<Vector> dirs;
  dirs.reserve(static_cast<std::size_t>(probes));
  if (dimension == 2) {
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi / probes);
    const double phase = phase_dist(rng);
    for (int i = 0; i < probes; ++i) {
      const double th = phase + 2.0 * std::numbers::pi * i / probes;
      Vector d(2);
      d << std::cos(th), std::sin(th);
      dirs.push_back(d);
    }
    return dirs;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  while (static_cast<int>(dirs.size()) < probes) {
    Vector d(dimension);
    for (int i = 0; i < dimension; ++i) d[i] = normal(rng);
    const double norm = d.norm();
    if (norm > 1e-12) dirs.push_back(d / norm);
  }
  return dirs;
}

Matrix estimate_jacobian_near_origin(const VectorField& field, double radius, int probes,
                                     const EnergyConfig& cfg, std::uint64_t seed, int threads) {
  if (!(radius > 0.0)) throw InputError("probe radius must be positive");
  if (probes < 1) throw InputError("need at least one probe");
  const auto dirs = probe_directions(field.dimension, probes, seed);
  std::vector<std::optional<Matrix>> estimates(dirs.size());
  IntegratorOptions opt = cfg.integration;
  opt.dt = cfg.dt;
  parallel_for(dirs.size(), threads, [&](std::size_t i) {
    const Trajectory traj = integrate(field, radius * dirs[i], cfg.horizon, opt);
    if (traj.termination == Termination::escaped || traj.size() < 2) return;
    const GramMatrices g = gram_matrices(traj, cfg.rule);
    if (!pe_check(g).excited) return;
    Eigen::LLT<Matrix> llt(g.gamma2);
    estimates[i] = llt.solve(g.gamma1.transpose()).transpose();
  });
  Matrix sum = Matrix::Zero(field.dimension, field.dimension);
  int used = 0;
  for (const auto& e : estimates) {
    if (e) {
      sum += *e;
      ++used;
    }
  }
  if (used == 0) {
    throw PersistencyError("every near-origin probe failed the excitation check", 0.0, 0.0);
  }
  return sum / used;
}

Matrix estimate_jacobian_near_origin(std::span<const Trajectory> trajectories, QuadratureRule rule) {
  Matrix sum;
  int used = 0;
  for (const auto& traj : trajectories) {
    const GramMatrices g = gram_matrices(traj, rule);
    if (!pe_check(g).excited) continue;
    Eigen::LLT<Matrix> llt(g.gamma2);
    const Matrix a_hat = llt.solve(g.gamma1.transpose()).transpose();
    sum = used == 0 ? a_hat : Matrix(sum + a_hat);
    ++used;
  }
  if (used == 0) {
    throw PersistencyError("every near-origin trajectory failed the excitation check", 0.0, 0.0);
  }
  return sum / used;
}

Matrix reference_jacobian(const VectorField& field, const ReferenceJacobianOptions& options,
                          const EnergyConfig& cfg, int threads) {
  if (options.source == JacobianSource::analytic) return jacobian_at_origin(field);
  return estimate_jacobian_near_origin(field, options.radius, options.probes, cfg, options.seed,
                                       threads);
}

std::vector<GridSample> energy_grid(const VectorField& field, const Matrix& a_ref,
                                    const GridSpec& grid, const EnergyConfig& cfg, int threads) {
  if (field.dimension != 2) throw InputError("energy grid needs a planar system");
  if (grid.resolution < 1 || !(grid.x_max > grid.x_min) || !(grid.y_max > grid.y_min)) {
    throw InputError("malformed grid specification");
  }
  const int res = grid.resolution;
  const auto coord = [res](double lo, double hi, int i) {
    return res == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (res - 1);
  };
  std::vector<GridSample> samples(static_cast<std::size_t>(res) * static_cast<std::size_t>(res));
  parallel_for(samples.size(), threads, [&](std::size_t idx) {
    const int row = static_cast<int>(idx) / res;
    const int col = static_cast<int>(idx) % res;
    GridSample& s = samples[idx];
    s.x = Point(coord(grid.x_min, grid.x_max, col), coord(grid.y_min, grid.y_max, row));
    if (s.x.norm() == 0.0) {
      // No excitation at the equilibrium itself.
      s.energy.value = std::numeric_limits<double>::infinity();
      s.energy.squashed = 1.0;
      s.energy.status = EnergyStatus::pe_failed;
      s.energy.horizon = cfg.horizon;
      return;
    }
    s.energy = residual_energy(field, Vector(s.x), a_ref, cfg);
  });
  return samples;
}

void write_energy_grid_csv(std::ostream& out, std::span<const GridSample> samples) {
  out << "x1,x2,E,tanhE,status\n" << std::setprecision(17);
  for (const auto& s : samples) {
    out << s.x[0] << ',' << s.x[1] << ',';
    if (std::isinf(s.energy.value)) {
      out << "inf";
    } else {
      out << s.energy.value;
    }
    out << ',' << s.energy.squashed << ',' << to_string(s.energy.status) << '\n';
  }
}

}  // namespace roaflow

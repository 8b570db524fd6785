#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "roaflow/estimator.hpp"
#include "roaflow/integrator.hpp"

namespace roaflow {

enum class EnergyStatus { ok, escaped, pe_failed };

[[nodiscard]] std::string_view to_string(EnergyStatus s);

/// Residual energy E(x0) = 0.5 * ||a_hat(x0) - a_ref||_F^2 over a finite
/// window, with E = inf for escaped or non-exciting trajectories.
struct ResidualEnergy {
  double value = 0.0;
  double squashed = 0.0;
  EnergyStatus status = EnergyStatus::ok;
  double horizon = 0.0;

  [[nodiscard]] bool finite() const noexcept { return status == EnergyStatus::ok; }
};

struct EnergyConfig {
  /// Window of the Gram matrices. The default, 39 * 0.1, gives 40 samples.
  double horizon = 3.9;
  double dt = 0.1;
  /// Integrate this long to decide escape; the Gram window stays `horizon`.
  /// Unset means the same as `horizon`.
  std::optional<double> escape_horizon;
  QuadratureRule rule = QuadratureRule::trapezoid;
  IntegratorOptions integration{};
};

/// tanh(value), with inf mapped to 1. Negative input throws InputError.
[[nodiscard]] double squash(double value);

[[nodiscard]] ResidualEnergy residual_energy(const VectorField& field, const Vector& x0,
                                             const Matrix& a_ref, const EnergyConfig& cfg = {});

/// Average of a_hat(x0_i) over `probes` initial conditions on the sphere of
/// radius `radius`. In the plane the probes are equally spaced in angle with
/// a seeded random phase; otherwise they are seeded random directions.
/// Probes that fail the excitation check are skipped; all failing throws.
[[nodiscard]] Matrix estimate_jacobian_near_origin(const VectorField& field, double radius,
                                                   int probes, const EnergyConfig& cfg = {},
                                                   std::uint64_t seed = 0, int threads = 1);

/// Data path: average a_hat over recorded near-origin trajectories.
[[nodiscard]] Matrix estimate_jacobian_near_origin(std::span<const Trajectory> trajectories,
                                                   QuadratureRule rule = QuadratureRule::trapezoid);

[[nodiscard]] std::vector<Vector> probe_directions(int dimension, int probes, std::uint64_t seed);

enum class JacobianSource { analytic, data_driven };

struct ReferenceJacobianOptions {
  JacobianSource source = JacobianSource::data_driven;
  double radius = 0.1;
  int probes = 8;
  std::uint64_t seed = 0;
};

/// The matrix used as A in the residual energy.
[[nodiscard]] Matrix reference_jacobian(const VectorField& field,
                                        const ReferenceJacobianOptions& options,
                                        const EnergyConfig& cfg, int threads = 1);

struct GridSpec {
  double x_min = -3, x_max = 3, y_min = -3, y_max = 3;
  int resolution = 50;
};

struct GridSample {
  Point x;
  ResidualEnergy energy;
};

/// Row-major over (x2, x1): resolution^2 samples, x1 varying fastest.
[[nodiscard]] std::vector<GridSample> energy_grid(const VectorField& field, const Matrix& a_ref,
                                                  const GridSpec& grid, const EnergyConfig& cfg,
                                                  int threads = 1);

/// CSV `x1,x2,E,tanhE,status`.
void write_energy_grid_csv(std::ostream& out, std::span<const GridSample> samples);

}  // namespace roaflow

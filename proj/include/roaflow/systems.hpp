#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roaflow/types.hpp"

namespace roaflow {

/// Autonomous vector field x' = f(x) with an equilibrium at the origin.
struct VectorField {
  std::string id;
  int dimension = 0;
  std::function<Vector(const Vector&)> eval;
  std::optional<Matrix> analytic_jacobian_at_origin;

  /// Evaluates f(x), checking the dimension.
  [[nodiscard]] Vector operator()(const Vector& x) const;
};

// Planar benchmarks.
[[nodiscard]] VectorField van_der_pol_reverse();
[[nodiscard]] VectorField unbounded_roa_system();
[[nodiscard]] VectorField rational_system();

/// Forward-time Van der Pol oscillator (mu = 1). Its limit cycle is
/// attracting, so the oracle integrates this field to trace the boundary of
/// the reverse-time system's region of attraction.
[[nodiscard]] VectorField van_der_pol_forward();

[[nodiscard]] VectorField make_linear_system(std::string id, Matrix a);

/// Reads a whitespace separated square matrix.
[[nodiscard]] Matrix load_matrix(const std::filesystem::path& path);

/// Resolves a registry key: `vdp_reverse`, `unbounded`, `rational` or
/// `linear:<file>`.
[[nodiscard]] VectorField lookup_system(std::string_view id);

[[nodiscard]] std::vector<std::string> benchmark_ids();

[[nodiscard]] Vector eval_field(std::string_view system_id, const Vector& x);

/// Throws InputError when the system has no analytic Jacobian; callers fall
/// back to the data-driven estimate in that case.
[[nodiscard]] Matrix jacobian_at_origin(std::string_view system_id);
[[nodiscard]] Matrix jacobian_at_origin(const VectorField& field);

/// Central-difference Jacobian of f at `at`.
[[nodiscard]] Matrix finite_difference_jacobian(const VectorField& field, const Vector& at,
                                                double step = 1e-6);

}  // namespace roaflow

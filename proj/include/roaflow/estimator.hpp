#pragma once

#include <optional>
#include <string>

#include "roaflow/trajectory.hpp"

namespace roaflow {

enum class QuadratureRule {
  trapezoid,  ///< composite trapezoid, O(dt^2)
  rectangle,  ///< left Riemann sum over every sample, matches X_dot * pinv(X)
};

[[nodiscard]] std::string_view to_string(QuadratureRule rule);

/// Trajectory Gram matrices gamma1 = int f(s) s^T dt, gamma2 = int s s^T dt
/// and gamma0 = int f(s) f(s)^T dt over the sampled span.
struct GramMatrices {
  Matrix gamma1;
  Matrix gamma2;
  std::optional<Matrix> gamma0;
  double horizon = 0.0;
  double dt = 0.0;
  QuadratureRule rule = QuadratureRule::trapezoid;
  Vector initial_state;
  Vector final_state;

  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(gamma2.rows()); }
};

[[nodiscard]] GramMatrices gram_matrices(const Trajectory& traj,
                                         QuadratureRule rule = QuadratureRule::trapezoid);

struct ExcitationReport {
  double lambda_min = 0.0;
  double tolerance = 0.0;
  bool excited = false;
};

/// 1e-10 * trace(gamma2): relative, so the verdict does not depend on |x0|.
[[nodiscard]] double default_pe_tolerance(const GramMatrices& g);

[[nodiscard]] ExcitationReport pe_check(const GramMatrices& g,
                                        std::optional<double> pe_tol = std::nullopt);

struct LinearEstimate {
  Matrix a_hat;
  Vector x0;
  double lambda_min_gamma2 = 0.0;
  double residual_cost = 0.0;
  double spectral_abscissa = 0.0;
  double horizon = 0.0;
  double dt = 0.0;
};

struct MinimizerOptions {
  std::optional<double> pe_tol;
  /// Instead of refusing a poorly excited trajectory, pseudo-solve on the
  /// eigenvectors of gamma2 whose eigenvalues exceed the tolerance.
  bool diagnostic = false;
};

/// Solves a_hat * gamma2 = gamma1 by Cholesky. Throws PersistencyError when
/// the excitation check fails (unless diagnostic).
[[nodiscard]] LinearEstimate minimizer(const GramMatrices& g, const Trajectory& traj,
                                       const MinimizerOptions& options = {});

/// Convenience: gram_matrices + minimizer with the same quadrature rule.
[[nodiscard]] LinearEstimate estimate_linear_model(const Trajectory& traj,
                                                   QuadratureRule rule = QuadratureRule::trapezoid,
                                                   const MinimizerOptions& options = {});

struct GradientFlowResult {
  LinearEstimate estimate;
  long iterations = 0;
  double residual = 0.0;  ///< ||gamma1 - B gamma2||_F at exit
  bool converged = false;
};

/// Explicit Euler on B' = gamma1 - B gamma2 until the residual drops below
/// `tol`. Requires 0 < step < 2 / lambda_max(gamma2).
[[nodiscard]] GradientFlowResult minimizer_gradient_flow(const GramMatrices& g, const Matrix& b0,
                                                         double step, long max_iters, double tol);

/// Quadrature of ||f(s) - a_bar s||^2 with the given rule.
[[nodiscard]] double cost(const Matrix& a_bar, const Trajectory& traj,
                          QuadratureRule rule = QuadratureRule::trapezoid);

/// trace(gamma0) - 2 trace(a_bar gamma1^T) + trace(a_bar gamma2 a_bar^T).
[[nodiscard]] double cost_from_gram(const Matrix& a_bar, const GramMatrices& g);

/// X_dot * pinv(X) for sampled states X (n x N) and derivatives X_dot.
/// Throws RankDeficientError unless X has full row rank.
[[nodiscard]] Matrix discrete_minimizer(const Matrix& x, const Matrix& xdot);

/// Largest real part among the eigenvalues.
[[nodiscard]] double spectral_abscissa(const Matrix& a);

/// Structured text record, one `key=value` per line, 17 significant digits.
[[nodiscard]] std::string format_estimate_report(const LinearEstimate& est);

}  // namespace roaflow

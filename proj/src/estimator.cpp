#include "roaflow/estimator.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace roaflow {

std::string_view to_string(QuadratureRule rule) {
  return rule == QuadratureRule::trapezoid ? "trapezoid" : "rectangle";
}

namespace {

std::vector<double> quadrature_weights(const Trajectory& traj, QuadratureRule rule) {
  const std::size_t m = traj.size();
  std::vector<double> w(m, 0.0);
  if (rule == QuadratureRule::rectangle) {
    const double dt = traj.uniform_spacing();
    std::fill(w.begin(), w.end(), dt);
    return w;
  }
  // Trapezoid on the actual sample times, so an off-grid tail still works.
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double h = traj.times[k + 1] - traj.times[k];
    w[k] += 0.5 * h;
    w[k + 1] += 0.5 * h;
  }
  return w;
}

void require_usable(const Trajectory& traj) {
  traj.validate();
  if (traj.size() < 2) {
    throw InputError("trajectory needs at least two samples");
  }
  if (!traj.derivatives) {
    throw InputError("trajectory has no derivatives; reconstruct them first");
  }
}

}  // namespace

GramMatrices gram_matrices(const Trajectory& traj, QuadratureRule rule) {
  require_usable(traj);
  const auto w = quadrature_weights(traj, rule);
  const Matrix& x = traj.states;
  const Matrix& fx = *traj.derivatives;
  const Eigen::Map<const Eigen::VectorXd> weights(w.data(), static_cast<Eigen::Index>(w.size()));
  const Matrix xw = x * weights.asDiagonal();
  const Matrix fw = fx * weights.asDiagonal();

  GramMatrices g;
  g.gamma1 = fw * x.transpose();
  const Matrix g2 = xw * x.transpose();
  g.gamma2 = 0.5 * (g2 + g2.transpose());
  const Matrix g0 = fw * fx.transpose();
  g.gamma0 = 0.5 * (g0 + g0.transpose());
  g.horizon = traj.times.back() - traj.times.front();
  g.dt = rule == QuadratureRule::rectangle ? traj.uniform_spacing()
                                           : g.horizon / static_cast<double>(traj.size() - 1);
  g.rule = rule;
  g.initial_state = traj.initial_state();
  g.final_state = traj.final_state();
  return g;
}

double default_pe_tolerance(const GramMatrices& g) { return 1e-10 * g.gamma2.trace(); }

ExcitationReport pe_check(const GramMatrices& g, std::optional<double> pe_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g.gamma2, Eigen::EigenvaluesOnly);
  ExcitationReport r;
  r.lambda_min = eig.eigenvalues().minCoeff();
  r.tolerance = pe_tol.value_or(default_pe_tolerance(g));
  r.excited = r.lambda_min > r.tolerance;
  return r;
}

double spectral_abscissa(const Matrix& a) {
  Eigen::EigenSolver<Matrix> eig(a, false);
  return eig.eigenvalues().real().maxCoeff();
}

namespace {

LinearEstimate solve_direct(const GramMatrices& g, const MinimizerOptions& options,
                            ExcitationReport& report) {
  report = pe_check(g, options.pe_tol);
  LinearEstimate est;
  est.lambda_min_gamma2 = report.lambda_min;
  est.x0 = g.initial_state;
  est.horizon = g.horizon;
  est.dt = g.dt;
  if (report.excited) {
    // gamma2 symmetric: a_hat^T = gamma2^{-1} gamma1^T.
    Eigen::LLT<Matrix> llt(g.gamma2);
    if (llt.info() == Eigen::Success) {
      est.a_hat = llt.solve(g.gamma1.transpose()).transpose();
      return est;
    }
  }
  if (!options.diagnostic) {
    std::ostringstream msg;
    msg << std::setprecision(6) << "trajectory is not persistently exciting: lambda_min(gamma2)="
        << report.lambda_min << " <= tolerance " << report.tolerance;
    throw PersistencyError(msg.str(), report.lambda_min, report.tolerance);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g.gamma2);
  const Vector& lambda = eig.eigenvalues();
  Vector inv = Vector::Zero(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > report.tolerance) inv[i] = 1.0 / lambda[i];
  }
  const Matrix& v = eig.eigenvectors();
  est.a_hat = g.gamma1 * v * inv.asDiagonal() * v.transpose();
  return est;
}

}  // namespace

LinearEstimate minimizer(const GramMatrices& g, const Trajectory& traj,
                         const MinimizerOptions& options) {
  ExcitationReport report;
  LinearEstimate est = solve_direct(g, options, report);
  est.residual_cost = cost(est.a_hat, traj, g.rule);
  est.spectral_abscissa = spectral_abscissa(est.a_hat);
  return est;
}

LinearEstimate estimate_linear_model(const Trajectory& traj, QuadratureRule rule,
                                     const MinimizerOptions& options) {
  return minimizer(gram_matrices(traj, rule), traj, options);
}

GradientFlowResult minimizer_gradient_flow(const GramMatrices& g, const Matrix& b0, double step,
                                           long max_iters, double tol) {
  const auto report = pe_check(g);
  if (!report.excited) {
    throw PersistencyError("gradient flow needs a persistently exciting trajectory",
                           report.lambda_min, report.tolerance);
  }
  if (b0.rows() != g.gamma1.rows() || b0.cols() != g.gamma1.cols()) {
    throw InputError("initial matrix has the wrong shape");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g.gamma2, Eigen::EigenvaluesOnly);
  const double lambda_max = eig.eigenvalues().maxCoeff();
  if (!(step > 0.0) || !(step < 2.0 / lambda_max)) {
    std::ostringstream msg;
    msg << "gradient flow step " << step << " is outside the stable range (0, "
        << 2.0 / lambda_max << ")";
    throw InputError(msg.str());
  }

  GradientFlowResult out;
  Matrix b = b0;
  Matrix grad = g.gamma1 - b * g.gamma2;
  double residual = grad.norm();
  long iter = 0;
  while (residual >= tol && iter < max_iters) {
    b += step * grad;
    grad = g.gamma1 - b * g.gamma2;
    residual = grad.norm();
    ++iter;
  }
  out.iterations = iter;
  out.residual = residual;
  out.converged = residual < tol;
  out.estimate.a_hat = b;
  out.estimate.x0 = g.initial_state;
  out.estimate.lambda_min_gamma2 = report.lambda_min;
  out.estimate.horizon = g.horizon;
  out.estimate.dt = g.dt;
  out.estimate.spectral_abscissa = spectral_abscissa(b);
  out.estimate.residual_cost = g.gamma0 ? std::max(0.0, cost_from_gram(b, g)) : 0.0;
  return out;
}

double cost(const Matrix& a_bar, const Trajectory& traj, QuadratureRule rule) {
  require_usable(traj);
  const auto w = quadrature_weights(traj, rule);
  const Matrix r = *traj.derivatives - a_bar * traj.states;
  double total = 0.0;
  for (Eigen::Index k = 0; k < r.cols(); ++k) {
    total += w[static_cast<std::size_t>(k)] * r.col(k).squaredNorm();
  }
  return total;
}

double cost_from_gram(const Matrix& a_bar, const GramMatrices& g) {
  if (!g.gamma0) throw InputError("cost_from_gram needs gamma0");
  return g.gamma0->trace() - 2.0 * (a_bar * g.gamma1.transpose()).trace() +
         (a_bar * g.gamma2 * a_bar.transpose()).trace();
}

Matrix discrete_minimizer(const Matrix& x, const Matrix& xdot) {
  if (x.rows() != xdot.rows() || x.cols() != xdot.cols()) {
    throw InputError("state and derivative sample matrices differ in shape");
  }
  if (x.cols() == 0) throw InputError("no samples");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(x);
  const auto rank = static_cast<int>(cod.rank());
  if (rank < x.rows()) {
    throw RankDeficientError("sample matrix has rank " + std::to_string(rank) + " < " +
                                 std::to_string(x.rows()),
                             rank);
  }
  return xdot * cod.pseudoInverse();
}

std::string format_estimate_report(const LinearEstimate& est) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "n=" << est.a_hat.rows() << '\n';
  out << "x0=";
  for (Eigen::Index i = 0; i < est.x0.size(); ++i) out << (i ? " " : "") << est.x0[i];
  out << '\n' << "a_hat=";
  for (Eigen::Index i = 0; i < est.a_hat.rows(); ++i) {
    for (Eigen::Index j = 0; j < est.a_hat.cols(); ++j) {
      out << (i || j ? " " : "") << est.a_hat(i, j);
    }
  }
  out << '\n';
  out << "lambda_min_gamma2=" << est.lambda_min_gamma2 << '\n';
  out << "residual_cost=" << est.residual_cost << '\n';
  out << "spectral_abscissa=" << est.spectral_abscissa << '\n';
  out << "horizon=" << est.horizon << '\n';
  out << "dt=" << est.dt << '\n';
  return out.str();
}

}  // namespace roaflow

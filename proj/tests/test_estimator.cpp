#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "roaflow/estimator.hpp"
#include "roaflow/integrator.hpp"

using namespace roaflow;

namespace {
Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}
Matrix diag12_matrix() {
  Matrix a(2, 2);
  a << -1, 0, 0, -2;
  return a;
}
Trajectory run(const VectorField& f, const Vector& x0, double horizon, double dt) {
  IntegratorOptions o;
  o.dt = dt;
  return integrate(f, x0, horizon, o);
}
GramMatrices manual_gram(const Matrix& g1, const Matrix& g2) {
  GramMatrices g;
  g.gamma1 = g1;
  g.gamma2 = g2;
  g.initial_state = Vector::Zero(g1.rows());
  g.final_state = Vector::Zero(g1.rows());
  return g;
}
Matrix random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix v(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(i, j) = normal(rng);
  return v / v.norm();
}
}  // namespace

TEST_CASE("gram matrices of a decaying linear system") {
  const VectorField f = make_linear_system("diag", diag12_matrix());
  const Trajectory t = run(f, v2(1, 1), 40.0, 1e-3);
  const GramMatrices g = gram_matrices(t);
  Matrix g2(2, 2), g1(2, 2);
  g2 << 1.0 / 2, 1.0 / 3, 1.0 / 3, 1.0 / 4;
  g1 << -1.0 / 2, -1.0 / 3, -2.0 / 3, -1.0 / 2;
  CHECK((g.gamma2 - g2).norm() < 1e-6);
  CHECK((g.gamma1 - g1).norm() < 1e-6);
  // against the Lyapunov-equation closed form over the same window
  const auto exact = oracles::linear_gram(diag12_matrix(), v2(1, 1), t.times.back());
  CHECK((g.gamma2 - exact.g2).norm() < 1e-6);
  CHECK((g.gamma1 - exact.g1).norm() < 1e-6);
  REQUIRE(g.gamma0.has_value());
  // f is up to twice s here, so the trapezoid error on gamma0 is larger
  CHECK((*g.gamma0 - exact.g0).norm() < 1e-5);
}

TEST_CASE("gram invariants: symmetric, PSD gamma2 and gamma0") {
  const Trajectory t = run(van_der_pol_reverse(), v2(1.2, -0.4), 3.9, 0.1);
  const GramMatrices g = gram_matrices(t);
  CHECK(g.gamma2 == g.gamma2.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> e2(g.gamma2), e0(*g.gamma0);
  CHECK(e2.eigenvalues().minCoeff() >= 0.0);
  CHECK(e0.eigenvalues().minCoeff() >= -1e-14);
}

TEST_CASE("fundamental theorem identity on every benchmark") {
  for (const auto& id : benchmark_ids()) {
    CAPTURE(id);
    const Trajectory t = run(lookup_system(id), v2(0.6, 0.3), 4.0, 1e-3);
    const GramMatrices g = gram_matrices(t);
    const Vector x0 = t.initial_state(), xt = t.final_state();
    const Matrix lhs = g.gamma1 + g.gamma1.transpose();
    const Matrix rhs = xt * xt.transpose() - x0 * x0.transpose();
    CHECK((lhs - rhs).norm() < 1e-6);
  }
}

TEST_CASE("van der pol grams match a fine rectangle-rule oracle") {
  const Trajectory t = run(van_der_pol_reverse(), v2(0.5, 0), 40.0, 1e-3);
  const GramMatrices g = gram_matrices(t);
  const auto ref = oracles::rectangle_gram(oracles::vdp_reverse, v2(0.5, 0), 40.0, 2e-5);
  CHECK((g.gamma1 - ref.g1).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((g.gamma2 - ref.g2).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((*g.gamma0 - ref.g0).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("excitation check") {
  Matrix g2(2, 2);
  g2 << 1.0 / 2, 1.0 / 3, 1.0 / 3, 1.0 / 4;
  const auto r = pe_check(manual_gram(Matrix::Zero(2, 2), g2));
  // closed form for a symmetric 2x2: (tr - sqrt(tr^2 - 4 det)) / 2
  const double tr = 0.75, det = 1.0 / 8 - 1.0 / 9;
  CHECK(r.lambda_min == doctest::Approx((tr - std::sqrt(tr * tr - 4 * det)) / 2).epsilon(1e-12));
  CHECK(r.lambda_min == doctest::Approx(0.0189998).epsilon(1e-5));
  CHECK(r.excited);

  // invariant subspace: the x1 axis of a decoupled system
  const VectorField f = make_linear_system("diag", diag12_matrix());
  const auto axis = pe_check(gram_matrices(run(f, v2(1, 0), 3.9, 0.1)));
  CHECK(axis.lambda_min == 0.0);
  CHECK_FALSE(axis.excited);

  Trajectory zero;
  for (int k = 0; k < 5; ++k) zero.times.push_back(0.1 * k);
  zero.states = Matrix::Zero(2, 5);
  zero.derivatives = Matrix::Zero(2, 5);
  const auto z = pe_check(gram_matrices(zero));
  CHECK(z.lambda_min == 0.0);
  CHECK_FALSE(z.excited);
}

TEST_CASE("pe tolerance is relative to the trace") {
  const Trajectory t = run(van_der_pol_reverse(), v2(0.5, 0.2), 3.9, 0.1);
  const GramMatrices g = gram_matrices(t);
  CHECK(default_pe_tolerance(g) == doctest::Approx(1e-10 * g.gamma2.trace()));
  const Trajectory small = run(make_linear_system("diag", diag12_matrix()), v2(1e-4, 1e-4), 3.9, 0.1);
  CHECK(pe_check(gram_matrices(small)).excited);
}

TEST_CASE("linear systems are recovered exactly") {
  const VectorField f = make_linear_system("diag", diag12_matrix());
  const LinearEstimate e = estimate_linear_model(run(f, v2(1, 1), 3.9, 0.1));
  CHECK((e.a_hat - diag12_matrix()).norm() < 1e-12);
  CHECK(e.residual_cost < 1e-20);
  CHECK(e.spectral_abscissa == doctest::Approx(-1.0));

  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix a = oracles::random_hurwitz(n, rng);
      Vector x0(n);
      for (int i = 0; i < n; ++i) x0[i] = normal(rng);
      const LinearEstimate est = estimate_linear_model(run(make_linear_system("r", a), x0, 3.9, 0.1));
      CHECK((est.a_hat - a).norm() < 1e-6);
    }
  }
}

TEST_CASE("minimizer refuses a non-exciting trajectory") {
  const VectorField f = make_linear_system("diag", diag12_matrix());
  const Trajectory t = run(f, v2(1, 0), 3.9, 0.1);
  try {
    (void)estimate_linear_model(t);
    FAIL("expected a persistency error");
  } catch (const PersistencyError& e) {
    CHECK(e.lambda_min() == 0.0);
    CHECK(e.tolerance() > 0.0);
  }
  MinimizerOptions diag;
  diag.diagnostic = true;
  const LinearEstimate e = estimate_linear_model(t, QuadratureRule::trapezoid, diag);
  // the excited direction is still identified
  CHECK(e.a_hat(0, 0) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(e.a_hat.col(1).isZero(1e-12));
}

TEST_CASE("degenerate trajectories are refused") {
  Trajectory one;
  one.times = {0.0};
  one.states = Matrix::Ones(2, 1);
  one.derivatives = Matrix::Ones(2, 1);
  CHECK_THROWS_AS((void)gram_matrices(one), InputError);
  Trajectory no_deriv = run(van_der_pol_reverse(), v2(0.5, 0), 3.9, 0.1);
  no_deriv.derivatives.reset();
  CHECK_THROWS_AS((void)gram_matrices(no_deriv), InputError);
}

TEST_CASE("van der pol minimizer is stable") {
  const LinearEstimate e = estimate_linear_model(run(van_der_pol_reverse(), v2(0.5, 0.5), 40.0, 0.1));
  CHECK(e.spectral_abscissa <= 1e-8);
}

TEST_CASE("gradient flow with identity gamma2 follows the closed form") {
  Matrix g1(2, 2);
  g1 << 0.3, -1.2, 2.0, 0.7;
  const GramMatrices g = manual_gram(g1, Matrix::Identity(2, 2));
  const double step = 0.3;
  for (long k : {1L, 5L, 17L}) {
    const auto r = minimizer_gradient_flow(g, Matrix::Zero(2, 2), step, k, 0.0);
    CHECK(r.iterations == k);
    CHECK_FALSE(r.converged);
    const Matrix expected = (1.0 - std::pow(1.0 - step, static_cast<double>(k))) * g1;
    CHECK((r.estimate.a_hat - expected).norm() < 1e-14);
  }
}

TEST_CASE("gradient flow fixed point and agreement with the direct solve") {
  const VectorField f = make_linear_system("diag", diag12_matrix());
  const Trajectory t = run(f, v2(1, 1), 40.0, 1e-3);
  const GramMatrices g = gram_matrices(t);
  const LinearEstimate direct = minimizer(g, t);

  const auto still = minimizer_gradient_flow(g, direct.a_hat, 1.0, 10, 1e-10);
  CHECK(still.iterations == 0);
  CHECK(still.converged);

  const auto r = minimizer_gradient_flow(g, Matrix::Zero(2, 2), 1.0, 100000, 1e-12);
  CHECK(r.converged);
  CHECK((r.estimate.a_hat - diag12_matrix()).norm() < 1e-10);
  CHECK((r.estimate.a_hat - direct.a_hat).norm() <= 1e-12 / direct.lambda_min_gamma2);
}

TEST_CASE("gradient flow rejects unstable steps") {
  const GramMatrices g = manual_gram(Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2));
  CHECK_THROWS_AS((void)minimizer_gradient_flow(g, Matrix::Zero(2, 2), 1.0, 10, 1e-8), InputError);
  CHECK_THROWS_AS((void)minimizer_gradient_flow(g, Matrix::Zero(2, 2), -0.1, 10, 1e-8), InputError);
}

TEST_CASE("cost: zero at the true matrix, convex, split identity") {
  const VectorField f = make_linear_system("diag", diag12_matrix());
  CHECK(cost(diag12_matrix(), run(f, v2(1, 1), 3.9, 0.1)) < 1e-20);

  const Trajectory t = run(van_der_pol_reverse(), v2(0.8, -0.3), 3.9, 0.1);
  const GramMatrices g = gram_matrices(t);
  const LinearEstimate e = minimizer(g, t);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a1 = e.a_hat + random_unit(2, rng);
    const Matrix a2 = e.a_hat + 2.0 * random_unit(2, rng);
    const double mid = cost(0.5 * (a1 + a2), t);
    CHECK(mid < 0.5 * cost(a1, t) + 0.5 * cost(a2, t));

    const Matrix d = a1 - e.a_hat;
    const double split = (d * g.gamma2 * d.transpose()).trace();
    CHECK(cost(a1, t) - cost(e.a_hat, t) == doctest::Approx(split).epsilon(1e-8));
    CHECK(cost_from_gram(a1, g) == doctest::Approx(cost(a1, t)).epsilon(1e-10));
  }
}

TEST_CASE("convexity is not strict for a rank-deficient gamma2") {
  const VectorField f = make_linear_system("diag", diag12_matrix());
  const Trajectory t = run(f, v2(1, 0), 3.9, 0.1);
  Matrix a1 = diag12_matrix(), a2 = diag12_matrix();
  // differ only in the column that multiplies the unexcited coordinate
  a1(0, 1) = 3.0;
  a2(1, 1) = -7.0;
  const double mid = cost(0.5 * (a1 + a2), t);
  CHECK(mid == doctest::Approx(0.5 * cost(a1, t) + 0.5 * cost(a2, t)).epsilon(1e-12));
}

TEST_CASE("minimizer is the global minimum") {
  const Trajectory t = run(unbounded_roa_system(), v2(0.9, 0.2), 3.9, 0.1);
  const LinearEstimate e = estimate_linear_model(t);
  const double j0 = cost(e.a_hat, t);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix v = random_unit(2, rng);
    for (double eps : {1e-2, 1e-1}) CHECK(cost(e.a_hat + eps * v, t) > j0);
  }
}

TEST_CASE("halving the grid spacing converges at second order") {
  std::vector<Matrix> est;
  for (double dt : {0.1, 0.05, 0.025}) {
    est.push_back(estimate_linear_model(run(van_der_pol_reverse(), v2(0.5, 0), 3.2, dt)).a_hat);
  }
  const double order = std::log2((est[0] - est[1]).norm() / (est[1] - est[2]).norm());
  CHECK(order >= 1.9);
}

TEST_CASE("discrete minimizer") {
  std::mt19937_64 rng(3);
  const Matrix a = oracles::random_hurwitz(3, rng);
  Matrix x = Matrix::Random(3, 10);
  CHECK((discrete_minimizer(x, a * x) - a).norm() < 1e-12);

  Matrix same(2, 4);
  same << 1, 1, 1, 1, 2, 2, 2, 2;
  try {
    (void)discrete_minimizer(same, same);
    FAIL("expected a rank error");
  } catch (const RankDeficientError& e) {
    CHECK(e.rank() == 1);
  }

  const Trajectory t = run(van_der_pol_reverse(), v2(0.5, 0), 3.9, 0.1);
  REQUIRE(t.size() == 40);
  const Matrix pinv_form = discrete_minimizer(t.states, *t.derivatives);
  const LinearEstimate rect = estimate_linear_model(t, QuadratureRule::rectangle);
  CHECK((pinv_form - rect.a_hat).norm() < 1e-10);
}

TEST_CASE("estimate report lists every field") {
  const LinearEstimate e = estimate_linear_model(run(van_der_pol_reverse(), v2(0.5, 0), 3.9, 0.1));
  const std::string r = format_estimate_report(e);
  for (const char* key : {"n=2", "a_hat=", "lambda_min_gamma2=", "residual_cost=", "spectral_abscissa=",
                          "horizon=", "dt="}) {
    CAPTURE(key);
    CHECK(r.find(key) != std::string::npos);
  }
}

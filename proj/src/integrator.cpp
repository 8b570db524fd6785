#include "roaflow/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace roaflow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension (Shampine), order 4.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

class DormandPrince {
 public:
  DormandPrince(const VectorField& field, const IntegratorOptions& opt) : f_(field), opt_(opt) {}

  double error_norm(const Vector& err, const Vector& y0, const Vector& y1) const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double sk = opt_.atol + opt_.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      const double r = err[i] / sk;
      sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(err.size()));
  }

  double initial_step(const Vector& y, const Vector& f0) const {
    const auto scaled = [&](const Vector& v) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double r = v[i] / (opt_.atol + opt_.rtol * std::abs(y[i]));
        sum += r * r;
      }
      return std::sqrt(sum / static_cast<double>(v.size()));
    };
    const double dn0 = scaled(y);
    const double dn1 = scaled(f0);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, opt_.max_step);
    const Vector f1 = f_.eval(y + h0 * f0);
    const double dn2 = scaled(f1 - f0) / h0;
    const double big = std::max(dn1, dn2);
    const double h1 = big <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / big, 0.2);
    return std::min({100.0 * h0, h1, opt_.max_step});
  }

  // One trial step; fills y1, k7 (= f(y1)), the dense coefficients and
  // returns the scaled error.
  double attempt(const Vector& y, const Vector& k1, double h) {
    const Vector k2 = f_.eval(y + h * (a21 * k1));
    const Vector k3 = f_.eval(y + h * (a31 * k1 + a32 * k2));
    const Vector k4 = f_.eval(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = f_.eval(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 = f_.eval(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y1_ = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    if (!y1_.allFinite()) {
      return std::numeric_limits<double>::infinity();
    }
    k7_ = f_.eval(y1_);
    const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7_);
    const Vector diff = y1_ - y;
    r1_ = y;
    r2_ = diff;
    r3_ = h * k1 - diff;
    r4_ = diff - h * k7_ - r3_;
    r5_ = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7_);
    const double e = error_norm(err, y, y1_);
    return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
  }

  [[nodiscard]] Vector dense(double theta) const {
    const double one_minus = 1.0 - theta;
    return r1_ + theta * (r2_ + one_minus * (r3_ + theta * (r4_ + one_minus * r5_)));
  }

  const Vector& y1() const { return y1_; }
  const Vector& k7() const { return k7_; }

 private:
  const VectorField& f_;
  const IntegratorOptions& opt_;
  Vector y1_, k7_, r1_, r2_, r3_, r4_, r5_;
};

}  // namespace

Trajectory integrate(const VectorField& field, const Vector& x0, double horizon,
                     const IntegratorOptions& options) {
  if (!(horizon > 0.0)) throw InputError("integration horizon must be positive");
  if (!(options.dt > 0.0)) throw InputError("sampling interval must be positive");
  if (x0.size() != field.dimension) {
    throw InputError("initial state has dimension " + std::to_string(x0.size()) + ", system '" +
                     field.id + "' expects " + std::to_string(field.dimension));
  }
  if (!x0.allFinite()) throw NumericalError("initial state is not finite");

  const double dt = options.dt;
  const auto last_index = static_cast<long>(std::floor(horizon / dt + 1e-9));
  const double t_end = static_cast<double>(last_index) * dt;

  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> derivs;
  const auto push = [&](double t, const Vector& y) {
    times.push_back(t);
    states.push_back(y);
    derivs.push_back(field.eval(y));
  };

  Trajectory traj;
  const auto finish = [&]() {
    const auto n = static_cast<Eigen::Index>(x0.size());
    const auto m = static_cast<Eigen::Index>(times.size());
    traj.times = std::move(times);
    traj.states.resize(n, m);
    Matrix d(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      traj.states.col(k) = states[static_cast<std::size_t>(k)];
      d.col(k) = derivs[static_cast<std::size_t>(k)];
    }
    traj.derivatives = std::move(d);
    return traj;
  };

  push(0.0, x0);
  if (x0.norm() > options.escape_radius) {
    traj.termination = Termination::escaped;
    return finish();
  }
  if (last_index == 0) return finish();

  DormandPrince stepper(field, options);
  double t = 0.0;
  Vector y = x0;
  Vector k1 = derivs.front();
  double h = stepper.initial_step(y, k1);
  long next = 1;
  long steps = 0;

  while (next <= last_index) {
    if (++steps > options.max_steps) {
      throw NumericalError("step budget exhausted integrating system '" + field.id + "'");
    }
    h = std::min({h, options.max_step, t_end - t});
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < h_min) {
      traj.termination = Termination::escaped;
      traj.step_underflow = true;
      return finish();
    }
    const double err = stepper.attempt(y, k1, h);
    if (!(err <= 1.0)) {
      const double shrink = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= shrink;
      continue;
    }
    const double t_new = (t_end - t - h <= 1e-12 * std::max(1.0, t_end)) ? t_end : t + h;
    // Emit every grid sample covered by this step.
    while (next <= last_index) {
      const double tk = static_cast<double>(next) * dt;
      if (tk > t_new + 1e-12 * std::max(1.0, t_new)) break;
      const Vector yk = (next == last_index && t_new == t_end) || tk >= t_new
                            ? stepper.y1()
                            : stepper.dense((tk - t) / h);
      push(tk, yk);
      ++next;
      const double r = yk.norm();
      if (r < options.convergence_radius) {
        traj.termination = Termination::converged_to_origin;
        return finish();
      }
      if (r > options.escape_radius) {
        traj.termination = Termination::escaped;
        return finish();
      }
    }
    t = t_new;
    y = stepper.y1();
    k1 = stepper.k7();
    if (y.norm() > options.escape_radius) {
      push(t, y);
      traj.termination = Termination::escaped;
      traj.off_grid_tail = true;
      return finish();
    }
    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
  }
  traj.termination = Termination::horizon_reached;
  return finish();
}

}  // namespace roaflow

#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's integrator, quadrature or geometry code.

#include <functional>
#include <random>
#include <vector>

#include "roaflow/types.hpp"

namespace oracles {

using roaflow::Matrix;
using roaflow::Point;
using roaflow::Vector;

using Field = std::function<Vector(const Vector&)>;

// Right-hand sides written out again from the equations, not taken from the
// library.
Vector vdp_reverse(const Vector& x);
Vector vdp_forward(const Vector& x);
Vector unbounded(const Vector& x);
Vector rational(const Vector& x);

/// Classical fixed-step RK4 from 0 to T.
Vector rk4(const Field& f, Vector x, double T, double h);

/// RK4 trajectory sampled every `every` steps (including t = 0).
std::vector<Vector> rk4_samples(const Field& f, Vector x, double h, long steps, long every);

struct Gram {
  Matrix g1, g2, g0;
};

/// Left rectangle sums of f(s)s^T, ss^T and f(s)f(s)^T along a fixed-step
/// RK4 solution with step h on [0, T].
Gram rectangle_gram(const Field& f, const Vector& x0, double T, double h);

/// Closed-form Gram pair for x' = Ax on [0, T]: gamma2 solves the Lyapunov
/// equation A G + G A^T = e^{AT} x0 x0^T e^{A^T T} - x0 x0^T, gamma1 = A gamma2.
Gram linear_gram(const Matrix& a, const Vector& x0, double T);

/// Matrix exponential (Eigen's unsupported MatrixFunctions module).
Matrix expm(const Matrix& a);

/// Random matrix whose symmetric part is negative definite, hence Hurwitz.
Matrix random_hurwitz(int n, std::mt19937_64& rng);

/// Central differences with step h.
Matrix central_jacobian(const Field& f, const Vector& x, double h);

/// +1 converged below r_conv, -1 escaped beyond r_esc, 0 otherwise (RK4).
int brute_membership(const Field& f, const Vector& x0, double t_max, double h, double r_conv,
                     double r_esc);

/// Max of x1 along the forward Van der Pol orbit after a transient, by RK4.
double vdp_amplitude(double transient, double h);

/// Hausdorff distance between closed polylines approximated by sampling
/// every edge at `per_edge` points and taking point-to-point minima.
double sampled_hausdorff(const std::vector<Point>& a, const std::vector<Point>& b, int per_edge);

/// Observed convergence order from three values at steps h, h/2, h/4.
double richardson_order(double e_h, double e_h2, double e_h4);

}  // namespace oracles

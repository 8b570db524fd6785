#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "roaflow/estimator.hpp"
#include "roaflow/systems.hpp"

using namespace roaflow;

namespace {
Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}
Matrix m2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}
}  // namespace

TEST_CASE("benchmark fields at fixed points") {
  CHECK((eval_field("vdp_reverse", v2(1, 0)) - v2(0, 1)).norm() == 0.0);
  CHECK((eval_field("vdp_reverse", v2(0, 1)) - v2(-1, -1)).norm() == 0.0);
  CHECK(eval_field("unbounded", v2(std::sqrt(3.0), 0)).norm() < 1e-15);
  CHECK(eval_field("rational", v2(0, 0)).norm() == 0.0);
}

TEST_CASE("origin is an equilibrium of every benchmark") {
  for (const auto& id : benchmark_ids()) {
    CAPTURE(id);
    CHECK(eval_field(id, Vector::Zero(2)).norm() == 0.0);
  }
}

TEST_CASE("fields agree with equations transcribed independently") {
  const oracles::Field refs[] = {oracles::vdp_reverse, oracles::unbounded, oracles::rational};
  const char* ids[] = {"vdp_reverse", "unbounded", "rational"};
  for (int k = 0; k < 3; ++k) {
    for (double a : {-2.5, -0.3, 0.0, 0.7, 3.1}) {
      for (double b : {-1.9, 0.0, 0.4, 2.2}) {
        CAPTURE(ids[k]);
        CHECK((eval_field(ids[k], v2(a, b)) - refs[k](v2(a, b))).norm() < 1e-13);
      }
    }
  }
}

TEST_CASE("analytic jacobians at the origin") {
  CHECK((jacobian_at_origin("vdp_reverse") - m2(0, -1, 1, -1)).norm() == 0.0);
  CHECK((jacobian_at_origin("unbounded") - m2(0, 1, -1, -1)).norm() == 0.0);
  CHECK((jacobian_at_origin("rational") - m2(-1, 1, -1, -1)).norm() == 0.0);
}

TEST_CASE("benchmark jacobians are Hurwitz") {
  for (const auto& id : benchmark_ids()) {
    CAPTURE(id);
    CHECK(spectral_abscissa(jacobian_at_origin(id)) < 0.0);
  }
}

TEST_CASE("finite-difference jacobian matches the analytic one") {
  for (const auto& id : benchmark_ids()) {
    CAPTURE(id);
    const VectorField f = lookup_system(id);
    const Matrix fd = finite_difference_jacobian(f, Vector::Zero(2), 1e-6);
    CHECK((fd - jacobian_at_origin(id)).cwiseAbs().maxCoeff() < 1e-6);
    const Matrix ref = oracles::central_jacobian(f.eval, Vector::Zero(2), 1e-6);
    CHECK((fd - ref).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("dimension mismatch and unknown ids are input errors") {
  CHECK_THROWS_AS((void)eval_field("vdp_reverse", Vector::Zero(3)), InputError);
  CHECK_THROWS_AS((void)lookup_system("lorenz"), InputError);
  CHECK_THROWS_AS((void)lookup_system("linear:/nonexistent/matrix.txt"), InputError);
}

TEST_CASE("linear systems from a matrix file") {
  const auto dir = std::filesystem::temp_directory_path() / "roaflow_systems_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "a.txt";
  {
    std::ofstream out(path);
    out << "# diagonal\n-1 0\n0 -2\n";
  }
  const VectorField f = lookup_system("linear:" + path.string());
  CHECK(f.dimension == 2);
  CHECK((f(v2(1, 1)) - v2(-1, -2)).norm() == 0.0);
  CHECK((jacobian_at_origin(f) - m2(-1, 0, 0, -2)).norm() == 0.0);

  {
    std::ofstream out(path);
    out << "1 2 3\n4 5\n";
  }
  CHECK_THROWS_AS((void)load_matrix(path), InputError);
  {
    std::ofstream out(path);
    out << "1 2\n3 4\n5 6\n";
  }
  CHECK_THROWS_AS((void)load_matrix(path), InputError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("fields without a registered jacobian report it as unavailable") {
  VectorField f{"anon", 1, [](const Vector& x) -> Vector { return -x; }, std::nullopt};
  CHECK_THROWS_AS((void)jacobian_at_origin(f), InputError);
}

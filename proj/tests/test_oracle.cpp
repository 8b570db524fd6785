#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "roaflow/oracle.hpp"

using namespace roaflow;

namespace {
Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("membership of simple points") {
  const VectorField f = van_der_pol_reverse();
  CHECK(roa_membership(f, v2(0.1, 0)) == Membership::inside);
  CHECK(roa_membership(f, v2(10, 10)) == Membership::outside);
  CHECK(to_string(Membership::undecided) == "undecided");
}

TEST_CASE("a point on the cycle stays undecided at moderate horizons") {
  const LimitCycle lc = van_der_pol_limit_cycle(64);
  MembershipOptions opt;
  opt.t_max = 20.0;
  CHECK(roa_membership(van_der_pol_reverse(), Vector(lc.section_point), opt) == Membership::undecided);
}

TEST_CASE("membership agrees with an independent RK4 classification") {
  const VectorField f = van_der_pol_reverse();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::vector<Point> pts;
  std::vector<int> labels;
  while (pts.size() < 40) {
    const Point p(coord(rng), coord(rng));
    const int l = oracles::brute_membership(oracles::vdp_reverse, Vector(p), 200.0, 1e-3, 1e-6, 1e3);
    if (l == 0) continue;
    pts.push_back(p);
    labels.push_back(l);
  }
  const auto got = roa_membership(f, pts, {}, 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CAPTURE(pts[i].transpose());
    CHECK(got[i] == (labels[i] > 0 ? Membership::inside : Membership::outside));
  }
}

TEST_CASE("reference limit cycle amplitude and consistency") {
  const LimitCycle a = van_der_pol_limit_cycle(400, 100.0);
  const LimitCycle b = van_der_pol_limit_cycle(400, 200.0);
  double amp_a = 0.0, amp_b = 0.0;
  for (const Point& p : a.curve.points) amp_a = std::max(amp_a, std::abs(p.x()));
  for (const Point& p : b.curve.points) amp_b = std::max(amp_b, std::abs(p.x()));
  CHECK(amp_a == doctest::Approx(2.0086).epsilon(1e-4));
  CHECK(std::abs(amp_a - amp_b) < 1e-4);
  CHECK(std::abs(a.section_point.x() - b.section_point.x()) < 1e-8);
  // independently recomputed with fixed-step RK4
  CHECK(a.section_point.x() == doctest::Approx(oracles::vdp_amplitude(100.0, 1e-3)).epsilon(1e-7));
  CHECK(a.period == doctest::Approx(6.6632868593).epsilon(1e-7));
  CHECK(a.curve.size() == 400);
  CHECK(is_simple(a.curve));
  CHECK(signed_area(a.curve) > 0.0);
  CHECK_THROWS_AS((void)reference_limit_cycle(7), InputError);
}

TEST_CASE("shrunk cycle is inside, inflated cycle is outside") {
  const VectorField f = van_der_pol_reverse();
  const BoundaryCurve c = reference_limit_cycle(64);
  std::vector<Point> in, out;
  for (const Point& p : c.points) {
    in.push_back(0.95 * p);
    out.push_back(1.05 * p);
  }
  for (Membership m : roa_membership(f, in, {}, 2)) CHECK(m == Membership::inside);
  for (Membership m : roa_membership(f, out, {}, 2)) CHECK(m == Membership::outside);
}

TEST_CASE("membership is monotone along rays near the cycle") {
  const VectorField f = van_der_pol_reverse();
  const BoundaryCurve c = reference_limit_cycle(16);
  for (const Point& p : c.points) {
    const Point inner = 0.97 * p;
    REQUIRE(roa_membership(f, Vector(inner)) == Membership::inside);
    CHECK(roa_membership(f, Vector(0.9 * inner)) == Membership::inside);
  }
}

TEST_CASE("hausdorff distance") {
  const BoundaryCurve c1 = circle_points(1.0, 360), c2 = circle_points(2.0, 360);
  CHECK(hausdorff_distance(c1, c1) == 0.0);
  CHECK(hausdorff_distance(c1, c2) == doctest::Approx(1.0).epsilon(1e-3));

  BoundaryCurve rotated = c1;
  std::rotate(rotated.points.begin(), rotated.points.begin() + 1, rotated.points.end());
  CHECK(hausdorff_distance(c1, rotated) < 1e-12);

  const BoundaryCurve cycle = reference_limit_cycle(50);
  const BoundaryCurve ring = circle_points(1.7, 37);
  CHECK(hausdorff_distance(cycle, ring) ==
        doctest::Approx(oracles::sampled_hausdorff(cycle.points, ring.points, 400)).epsilon(2e-3));
}

TEST_CASE("hausdorff distance is a metric on sampled triples") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> r(0.5, 2.0), shift(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    BoundaryCurve a = circle_points(r(rng), 17), b = circle_points(r(rng), 23), c = circle_points(r(rng), 11);
    const Point da(shift(rng), shift(rng)), db(shift(rng), shift(rng));
    for (Point& p : a.points) p += da;
    for (Point& p : b.points) p += db;
    const double ab = hausdorff_distance(a, b), ba = hausdorff_distance(b, a);
    CHECK(ab == ba);
    CHECK(hausdorff_distance(a, c) <= ab + hausdorff_distance(b, c) + 1e-12);
  }
}

TEST_CASE("distance to a polyline") {
  const BoundaryCurve square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 0};
  CHECK(distance_to_polyline(Point(0.5, -2), square) == doctest::Approx(2.0));
  CHECK(distance_to_polyline(Point(0.5, 0.5), square) == doctest::Approx(0.5));
  CHECK(distance_to_polyline(Point(2, 2), square) == doctest::Approx(std::sqrt(2.0)));
}

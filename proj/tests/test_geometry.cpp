#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ppdm/error.hpp"
#include "ppdm/geometry.hpp"

using namespace ppdm;

namespace {

bool near(const Vec3& a, const Vec3& b, double tol = 1e-12) { return norm(a - b) <= tol; }

Motion randomMotion(std::mt19937_64& rng, int kind) {
  std::uniform_real_distribution<double> u(-1, 1);
  Vec3 v{u(rng) * 3, u(rng) * 3, u(rng) * 3};
  Point3 a{u(rng), u(rng), u(rng)};
  Vec3 axis = normalized(Vec3{u(rng), u(rng), u(rng)});
  double ang = u(rng) * M_PI;
  if (kind == 0) return Motion::translate(v);
  if (kind == 1) return Motion::rotate(a, axis, ang);
  return Motion::screw(v, a, axis, ang);
}

// Residual sign changes on a dense grid must sit next to a reported root.
void checkDense(const MovingPlane& mp, const std::function<double(double)>& f, const std::vector<double>& roots) {
  const int n = 10000;
  double prev = f(0);
  for (int i = 1; i <= n; ++i) {
    double t = double(i) / n, cur = f(t);
    if ((prev > 0) != (cur > 0) && prev != 0 && cur != 0) {
      bool found = false;
      for (double r : roots) found |= r >= (i - 1.0) / n - kEpsT && r <= t + kEpsT;
      CHECK(found);
    }
    prev = cur;
  }
  for (double r : roots) CHECK(std::abs(f(r)) < 1e-6);
  (void)mp;
}

}  // namespace

TEST_CASE("evaluate_motion examples") {
  Motion tr = Motion::translate({0, 0, -2});
  Plane z4{{0, 0, 1}, 4};
  Plane p = evaluate_motion(tr, 0.5, z4);
  CHECK(near(p.normal, {0, 0, 1}));
  CHECK(p.offset == doctest::Approx(3.0));

  Motion rot = Motion::rotate({0, 0, 0}, {0, 0, 1}, M_PI / 2);
  CHECK(near(evaluate_motion(rot, 1.0, Point3{1, 0, 0}), {0, 1, 0}));

  Motion sc = Motion::screw({0, 0, 1}, {0, 0, 0}, {0, 0, 1}, M_PI);
  CHECK(near(evaluate_motion(sc, 0.5, Point3{1, 0, 0}), {0, 1, 0.5}));
}

TEST_CASE("motion identities") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2), ut(0, 1);
  for (int k = 0; k < 300; ++k) {
    Motion m = randomMotion(rng, k % 3);
    Point3 p{u(rng), u(rng), u(rng)};
    CHECK(near(evaluate_motion(m, 0.0, p), p));
    double s = ut(rng), tau = ut(rng);
    // restricted and remaining pieces compose back to the full motion
    CHECK(near(evaluate_motion(m.restricted(s), tau, p), evaluate_motion(m, s * tau, p), 1e-9));
    Point3 mid = evaluate_motion(m, s, p);
    CHECK(near(evaluate_motion(m.remaining(s), tau, mid), evaluate_motion(m, s + (1 - s) * tau, p), 1e-9));
    Point3 end = evaluate_motion(m, 1.0, p);
    CHECK(near(evaluate_motion(m.inverse(), tau, end), evaluate_motion(m, 1 - tau, p), 1e-9));
    // plane incidence is preserved
    Vec3 n = normalized(Vec3{u(rng), u(rng), u(rng)});
    Plane pl = Plane::through(p, n);
    double t = ut(rng);
    Plane moved = evaluate_motion(m, t, pl);
    CHECK(std::abs(norm(moved.normal) - 1.0) < 1e-12);
    CHECK(std::abs(moved.signedDistance(evaluate_motion(m, t, p))) < kEpsGeom);
    if (m.kind == MotionKind::kTranslation) CHECK(near(moved.normal, pl.normal));
  }
}

TEST_CASE("plane_plane_intersect") {
  auto r = plane_plane_intersect({{0, 0, 1}, 0}, {{1, 0, 0}, 0});
  REQUIRE(r.kind == PlanePairKind::kLine);
  CHECK(std::abs(std::abs(r.line.direction.y) - 1.0) < 1e-12);
  CHECK(norm(r.line.point) < 1e-12);
  CHECK(plane_plane_intersect({{0, 0, 1}, 0}, {{0, 0, 1}, 1}).kind == PlanePairKind::kParallel);
  CHECK(plane_plane_intersect({{0, 0, 1}, 0}, {{0, 0, -1}, -0.0}).kind == PlanePairKind::kCoincident);
  CHECK(plane_plane_intersect({{0, 0, 1}, 2}, {{0, 0, -1}, -2}).kind == PlanePairKind::kCoincident);
}

TEST_CASE("event_roots examples") {
  MovingPlane mp{{{0, 0, 1}, 4}, Motion::translate({0, 0, -4})};
  auto r = event_roots(mp, EventConstraint::pointCrossing({1, 1, 2}), 0, 1);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(0.5).epsilon(1e-12));

  try {
    event_roots(mp, EventConstraint::parallelism({{0, 0, 1}, 0}), 0, 1);
    FAIL("expected degenerate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateConstraint);
  }

  MovingPlane rot{{{1, 0, 0}, 0}, Motion::rotate({0, 0, 0}, {0, 1, 0}, M_PI / 2)};
  auto pr = event_roots(rot, EventConstraint::parallelism({{0, 0, 1}, 0}), 0, 1);
  REQUIRE(pr.size() == 1);
  CHECK(pr[0] == doctest::Approx(1.0).epsilon(1e-9));
  // dense sampling of |n(t) x k| has its minimum there
  double best = 1, bestT = 0;
  for (int i = 0; i <= 10000; ++i) {
    double t = i / 10000.0;
    double v = norm(cross(rot.at(t).normal, {0, 0, 1}));
    if (v < best) best = v, bestT = t;
  }
  CHECK(std::abs(bestT - pr[0]) < 1e-4);

  // point always on the plane is degenerate
  MovingPlane spin{{{1, 0, 0}, 0}, Motion::rotate({0, 0, 0}, {0, 0, 1}, 1.0)};
  CHECK_THROWS_AS(event_roots(spin, EventConstraint::pointCrossing({0, 0, 5}), 0, 1), Error);
  MovingPlane slide{{{0, 0, 1}, 1}, Motion::translate({1, 0, 0})};
  CHECK_THROWS_AS(event_roots(slide, EventConstraint::pointCrossing({5, 5, 1}), 0, 1), Error);
}

TEST_CASE("line containment needs both sample points") {
  MovingPlane mp{{{0, 0, 1}, 3}, Motion::translate({0, 0, -2})};
  auto r = event_roots(mp, EventConstraint::lineContainment({{0, 0, 2}, {0, 1, 0}}), 0, 1);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(0.5));
  CHECK(event_roots(mp, EventConstraint::lineContainment({{0, 0, 2}, normalized(Vec3{0, 1, 1})}), 0, 1).empty());
}

TEST_CASE("box exit of a moving vertex") {
  // Plane x = 1 moving to x = 11; vertex on y = 0, z = 0 leaves box [-5,5]^3 at x = 5.
  MovingPlane mp{{{1, 0, 0}, 1}, Motion::translate({10, 0, 0})};
  ModelingSpaceBox box{{-5, -5, -5}, {5, 5, 5}};
  auto r = event_roots(mp, EventConstraint::boxExit({{0, 1, 0}, 0}, {{0, 0, 1}, 0}, box), 0, 1);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(0.4).epsilon(1e-8));
}

TEST_CASE("randomized dense-sampling root oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 60; ++k) {
    Motion m = randomMotion(rng, k % 3);
    Plane base = Plane::through({u(rng), u(rng), u(rng)}, normalized(Vec3{u(rng), u(rng), u(rng)}));
    MovingPlane mp{base, m};
    Point3 p{u(rng) * 2, u(rng) * 2, u(rng) * 2};
    auto roots = event_roots(mp, EventConstraint::pointCrossing(p), 0, 1);
    checkDense(mp, [&](double t) { return mp.at(t).signedDistance(p); }, roots);

    if (m.rotates()) {
      Plane other{normalized(Vec3{u(rng), u(rng), u(rng)}), 0};
      auto pr = event_roots(mp, EventConstraint::parallelism(other), 0, 1);
      for (double t : pr) CHECK(norm(cross(mp.at(t).normal, other.normal)) < 1e-6);
    }
  }
}

TEST_CASE("translation invariance of crossings") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 50; ++k) {
    Motion m = randomMotion(rng, k % 2);
    Plane base = Plane::through({u(rng), u(rng), u(rng)}, normalized(Vec3{u(rng), u(rng), u(rng)}));
    Point3 p{u(rng), u(rng), u(rng)};
    Vec3 shift{u(rng) * 5, u(rng) * 5, u(rng) * 5};
    Motion m2 = m;
    m2.axis_point = m.axis_point + shift;
    Plane base2{base.normal, base.offset + dot(base.normal, shift)};
    auto r1 = event_roots({base, m}, EventConstraint::pointCrossing(p), 0, 1);
    auto r2 = event_roots({base2, m2}, EventConstraint::pointCrossing(p + shift), 0, 1);
    REQUIRE(r1.size() == r2.size());
    for (size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] == doctest::Approx(r2[i]).epsilon(1e-9));
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ppdm/boolean.hpp"
#include "ppdm/error.hpp"
#include "ppdm/fixtures.hpp"
#include "ppdm/mass.hpp"
#include "ppdm/pushpull.hpp"

using namespace ppdm;

namespace {

Body cube(double s = 1) { return make_fixture("box", {{"w", s}, {"d", s}, {"h", s}}); }

PushPullRequest req(std::vector<std::string> tags, Motion m) {
  PushPullRequest r;
  r.tags = std::move(tags);
  r.motion = m;
  return r;
}

double deg(double d) { return d * M_PI / 180.0; }

bool hasTag(const Body& b, const std::string& tag) { return !b.facesWithTag(tag).empty(); }

// Fraction of sample points in [lo,hi] where the body and the predicate disagree.
double disagreement(const Body& b, const oracle::Inside& inside, Point3 lo, Point3 hi, int n = 4000) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y), uz(lo.z, hi.z);
  int bad = 0;
  for (int i = 0; i < n; ++i) {
    Point3 p{ux(rng), uy(rng), uz(rng)};
    bool a = classify_point(b, p) == Classification::kInside;
    if (a != inside(p)) ++bad;
  }
  return double(bad) / n;
}

}  // namespace

TEST_CASE("regenerate cube top face upward") {
  auto r = regenerate(cube(), {"top"}, transformAt(Motion::translate({0, 0, 0.5}), 1.0));
  REQUIRE(r.ok);
  CHECK(r.report.empty());
  CHECK(volume(r.body) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("regenerate notch block past the apex inserts a connection") {
  Body b = make_fixture("notch_block", {});
  auto r = regenerate(b, {"top"}, transformAt(Motion::translate({0, 0, -1.5}), 1.0));
  REQUIRE_FALSE(r.ok);
  CHECK(r.report.has(IllBoundedKind::kExtraIntersection));
  CHECK((r.report.has(IllBoundedKind::kExtraIntersection, "notch_l") ||
         r.report.has(IllBoundedKind::kExtraIntersection, "notch_r")));
  CHECK_FALSE(r.report.has(IllBoundedKind::kOpenBoundary));
}

TEST_CASE("regenerate notch block above the apex stays valid") {
  Body b = make_fixture("notch_block", {});
  auto r = regenerate(b, {"top"}, transformAt(Motion::translate({0, 0, -0.5}), 1.0));
  CHECK(r.ok);
}

TEST_CASE("regenerate step block riser past the block loses the ledge") {
  Body b = make_fixture("step_block", {});
  auto r = regenerate(b, {"riser"}, transformAt(Motion::translate({3, 0, 0}), 1.0));
  REQUIRE_FALSE(r.ok);
  CHECK(r.report.has(IllBoundedKind::kOpenBoundary));
  CHECK(r.report.has(IllBoundedKind::kOpenBoundary, "ledge"));
}

TEST_CASE("regenerate rejects unknown tags") {
  CHECK_THROWS_AS(regenerate(cube(), {"nope"}, Rigid{}), Error);
}

TEST_CASE("merge_adjacent_faces") {
  CHECK(merge_adjacent_faces(make_fixture("vslot", {}), std::vector<std::string>{"slot_left", "slot_right"}).size() == 1);
  auto opp = merge_adjacent_faces(cube(), std::vector<std::string>{"left", "right"});
  CHECK(opp.size() == 2);
  auto corner = merge_adjacent_faces(cube(), std::vector<std::string>{"top", "right", "back"});
  REQUIRE(corner.size() == 1);
  CHECK(corner[0].merged);
  CHECK(corner[0].pp_faces.size() == 3);
  CHECK(corner[0].nei_faces.size() == 3);
  CHECK_THROWS_AS(merge_adjacent_faces(cube(), std::vector<std::string>{"missing"}), Error);
}

TEST_CASE("detect_next_tcp on the slotted block") {
  Body b = make_fixture("slotted_block", {});
  Motion m = Motion::translate({0, 0, -4});
  auto ctx = merge_adjacent_faces(b, std::vector<std::string>{"top"});
  auto ev = detect_next_tcp(b, ctx[0], m, 0.0);
  REQUIRE(ev);
  CHECK(ev->t == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(ev->kind == TcpKind::kNewConnectionOuter);
  CHECK(ev->confirmed);

  auto res = apply_push_pull(b, req({"top"}, m));
  REQUIRE(res.trace.events.size() == 2);
  CHECK(std::abs(res.trace.events[0].t - 0.5) < 1e-6);
  CHECK(std::abs(res.trace.events[1].t - 0.75) < 1e-6);
  for (const auto& e : res.trace.events) CHECK(e.kind == TcpKind::kNewConnectionOuter);
}

TEST_CASE("detect_next_tcp finds nothing for a short cube push") {
  Body b = cube();
  auto ctx = merge_adjacent_faces(b, std::vector<std::string>{"top"});
  CHECK_FALSE(detect_next_tcp(b, ctx[0], Motion::translate({0, 0, -0.5}), 0.0));
}

TEST_CASE("box top rotated about an edge reaches tangency") {
  Body b = make_fixture("box", {{"w", 2}, {"d", 1}, {"h", 1}});
  Motion m = Motion::rotate({0, 0, 1}, {0, 1, 0}, 2 * M_PI / 3);
  auto res = apply_push_pull(b, req({"top"}, m));
  REQUIRE(res.trace.events.size() == 2);
  // The free top edge sweeps down onto the far bottom corner first.
  CHECK(res.trace.events[0].t == doctest::Approx(std::atan(0.5) / (2 * M_PI / 3)).epsilon(1e-9));
  CHECK(res.trace.events[0].kind == TcpKind::kNewConnectionOuter);
  CHECK(res.trace.events[1].t == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(res.trace.events[1].kind == TcpKind::kLostConnectionTangency);
  CHECK(res.trace.volumes[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(res.trace.final_report.valid);
}

TEST_CASE("workspace exit of a rotating face") {
  Body b = make_fixture("box", {{"w", 2}, {"d", 1}, {"h", 1}});
  auto r = req({"top"}, Motion::rotate({0, 0, 1}, {0, 1, 0}, -M_PI / 3));
  r.workspace_scale = 2.0;
  auto res = apply_push_pull(b, r);
  REQUIRE(res.trace.events.size() == 1);
  CHECK(res.trace.events[0].kind == TcpKind::kLostConnectionWorkspace);
  const double zTop = res.trace.workspace.hi.z;
  const double phi = std::atan((zTop - 1) / 2);
  CHECK(res.trace.events[0].t == doctest::Approx(phi / (M_PI / 3)).epsilon(1e-7));
  // Material stays inside the box: the wedge above the box top is cut off.
  const double t60 = std::tan(M_PI / 3);
  const double x0 = (zTop - 1) / t60;
  const double expected = 2 + 2 * t60 - 0.5 * (2 - x0) * (1 + 2 * t60 - zTop);
  CHECK(volume(res.body) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(res.trace.final_report.valid);
}

TEST_CASE("build_auxiliary prisms on the cube") {
  Body b = cube();
  auto ctx = merge_adjacent_faces(b, std::vector<std::string>{"top"});
  auto up = build_auxiliary(b, ctx[0], Motion::translate({0, 0, 0.5}), 0, 1);
  REQUIRE(up.size() == 1);
  CHECK(up[0].sign == AuxSign::kAdditive);
  CHECK(volume(up[0].body) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(validate(up[0].body).valid);
  CHECK(disagreement(up[0].body, [](const Point3& p) { return p.x > 0 && p.x < 1 && p.y > 0 && p.y < 1 && p.z > 1 && p.z < 1.5; },
                     {-0.5, -0.5, 0.5}, {1.5, 1.5, 2}) == 0.0);

  auto down = build_auxiliary(b, ctx[0], Motion::translate({0, 0, -0.5}), 0, 1);
  REQUIRE(down.size() == 1);
  CHECK(down[0].sign == AuxSign::kSubtractive);
  CHECK(volume(down[0].body) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(build_auxiliary(b, ctx[0], Motion::translate({0, 0, 1}), 0.3, 0.3).empty());
}

TEST_CASE("rot_wedge top rotation decomposes into two equal wedges") {
  Body b = make_fixture("rot_wedge_base", {});
  auto ctx = merge_adjacent_faces(b, std::vector<std::string>{"top"});
  const double th = deg(20);
  auto parts = build_auxiliary(b, ctx[0], Motion::rotate({2, 0, 2}, {0, 1, 0}, th), 0, 1);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].sign != parts[1].sign);
  const double wedge = 4 * std::tan(th);
  for (const auto& p : parts) {
    CHECK(validate(p.body).valid);
    CHECK(volume(p.body) == doctest::Approx(wedge).epsilon(1e-9));
  }
  CHECK(std::abs(volume(parts[0].body) - volume(parts[1].body)) <= 1e-9);
  // The rotation drops the +x half, so material is added over x<2 and removed over x>2.
  const double tn = std::tan(th);
  for (const auto& p : parts) {
    oracle::Inside in;
    if (p.sign == AuxSign::kAdditive)
      in = [tn](const Point3& q) { return q.x > 0 && q.x < 2 && q.y > 0 && q.y < 2 && q.z > 2 && q.z < 2 + (2 - q.x) * tn; };
    else
      in = [tn](const Point3& q) { return q.x > 2 && q.x < 4 && q.y > 0 && q.y < 2 && q.z < 2 && q.z > 2 - (q.x - 2) * tn; };
    CHECK(disagreement(p.body, in, {-0.5, -0.5, 1}, {4.5, 2.5, 3}) == 0.0);
    auto est = mc_volume(p.body, 200000, 11);
    CHECK(std::abs(est.estimate - wedge) <= 3 * est.stderr_ + 1e-12);
  }
}

TEST_CASE("subdivide_overlaps") {
  AuxiliaryVolume a;
  a.body = cube();
  a.sign = AuxSign::kAdditive;
  a.source_tags = {"a"};
  AuxiliaryVolume far = a;
  far.body = translated(cube(), {5, 0, 0});
  far.source_tags = {"b"};
  auto disjoint = subdivide_overlaps({a, far});
  REQUIRE(disjoint.size() == 2);
  CHECK(volume(disjoint[0].body) + volume(disjoint[1].body) == doctest::Approx(2.0));

  auto same = subdivide_overlaps({a, a});
  REQUIRE(same.size() == 1);
  CHECK(same[0].sign == AuxSign::kAdditive);
  CHECK(volume(same[0].body) == doctest::Approx(1.0).epsilon(1e-12));

  AuxiliaryVolume s = a;
  s.body = translated(cube(), {0.5, 0, 0});
  s.sign = AuxSign::kSubtractive;
  s.source_tags = {"s"};
  auto mixed = subdivide_overlaps({a, s});
  double add = 0, sub = 0;
  for (const auto& p : mixed) (p.sign == AuxSign::kAdditive ? add : sub) += volume(p.body);
  CHECK(add == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sub == doctest::Approx(0.5).epsilon(1e-12));

  // Pairwise disjoint afterwards, and order-independent when applied.
  Body base = make_fixture("box", {{"w", 3}, {"d", 1}, {"h", 1}});
  base = translated(base, {-1, 0, 0.5});
  auto fwd = apply_auxiliaries(base, mixed);
  std::vector<AuxiliaryVolume> rev(mixed.rbegin(), mixed.rend());
  auto bwd = apply_auxiliaries(base, rev);
  CHECK(symdiff_volume(fwd, bwd) <= 1e-9);
}

TEST_CASE("horizontal vslot push is independent of aux order") {
  Body b = make_fixture("vslot", {});
  auto r = req({"slot_left", "slot_right"}, Motion::translate({0.5, 0, 0}));
  auto fwd = apply_push_pull(b, r);
  r.reverse_aux_order = true;
  auto bwd = apply_push_pull(b, r);
  CHECK(fwd.trace.final_report.valid);
  CHECK(symdiff_volume(fwd.body, bwd.body) <= 1e-9);
  CHECK(volume(fwd.body) == doctest::Approx(14.0).epsilon(1e-12));
  // The two per-face sweeps overlap near the apex; opposite signs cancel there.
  auto ctx = merge_adjacent_faces(b, r);
  auto auxes = build_auxiliary(b, ctx[0], r.motion, 0, 1);
  REQUIRE(auxes.size() == 2);
  CHECK(volume(bool_op(auxes[0].body, auxes[1].body, BoolKind::kIntersection)) > 0.01);
  // Shifted V: membership of the translated profile.
  auto shifted = [](const Point3& p) {
    if (p.x < 0 || p.x > 4 || p.y < 0 || p.y > 2 || p.z < 0 || p.z > 2) return false;
    return p.z < 1 + std::abs(p.x - 2.5);
  };
  CHECK(disagreement(fwd.body, shifted, {-0.5, -0.5, -0.5}, {4.5, 2.5, 2.5}) == 0.0);
}

TEST_CASE("merged vertical vslot push leaves no missed volume") {
  Body b = make_fixture("vslot", {});
  auto res = apply_push_pull(b, req({"slot_left", "slot_right"}, Motion::translate({0, 0, -0.5})));
  CHECK(res.trace.final_report.valid);
  // Direct CSG: the block minus the V lowered by 0.5.
  auto lowered = [](const Point3& p) {
    if (p.x < 0 || p.x > 4 || p.y < 0 || p.y > 2 || p.z < 0 || p.z > 2) return false;
    return p.z < 0.5 + std::abs(p.x - 2);
  };
  CHECK(volume(res.body) == doctest::Approx(16 - 2 * 2.25).epsilon(1e-12));
  CHECK(disagreement(res.body, lowered, {-0.5, -0.5, -0.5}, {4.5, 2.5, 2.5}) == 0.0);
}

TEST_CASE("step block riser push drops the ledge") {
  Body b = make_fixture("step_block", {});
  auto res = apply_push_pull(b, req({"riser"}, Motion::translate({3, 0, 0})));
  REQUIRE(res.trace.events.size() == 1);
  CHECK(res.trace.events[0].t == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(res.trace.face_counts[1] < res.trace.face_counts[0]);
  CHECK(res.trace.volumes[1] == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(volume(res.body) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK_FALSE(hasTag(res.body, "ledge"));
  CHECK(hasTag(res.body, "riser"));
}

TEST_CASE("slotted block keeps the hole walls between the events") {
  Body b = make_fixture("slotted_block", {});
  Motion m = Motion::translate({0, 0, -4});
  auto mid = apply_push_pull(b, req({"top"}, m.restricted(0.625)));
  CHECK(mid.trace.final_report.valid);
  CHECK(hasTag(mid.body, "hole_left"));
  CHECK(hasTag(mid.body, "hole_right"));
  CHECK(hasTag(mid.body, "hole_bottom"));
  CHECK_FALSE(hasTag(mid.body, "hole_top"));
  double wall = 0;
  for (int f : mid.body.facesWithTag("hole_left")) wall += faceArea(mid.body, f);
  CHECK(wall == doctest::Approx(0.5 * 4).epsilon(1e-12));
  CHECK(volume(mid.body) == doctest::Approx(4 * (4 * 1.5 - 2 * 0.5)).epsilon(1e-12));

  auto full = apply_push_pull(b, req({"top"}, m));
  CHECK(full.body.empty());
  CHECK_FALSE(full.trace.notes.empty());
}

TEST_CASE("crank step push removes the swept prism") {
  Body b = make_fixture("crank_step", {});
  auto res = apply_push_pull(b, req({"F1"}, Motion::translate({0, 0, -1.5})));
  REQUIRE(res.trace.events.size() == 1);
  CHECK(res.trace.events[0].t == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  // Profile area above z=1.5: the chamfered cap (5) plus a 6×0.5 slab.
  const double swept = 2 * (5 + 6 * 0.5);
  CHECK(volume(res.body) == doctest::Approx(34 - swept).epsilon(1e-12));
  CHECK(hasTag(res.body, "F1"));
  CHECK_FALSE(hasTag(res.body, "F2"));
  CHECK_FALSE(hasTag(res.body, "F3"));
}

TEST_CASE("dovetail floor passes through the hole") {
  Body b = make_fixture("dovetail_over_holes", {});
  auto res = apply_push_pull(b, req({"dt_floor"}, Motion::translate({0, 0, -2.25})));
  REQUIRE(res.trace.events.size() == 2);
  CHECK(res.trace.events[0].t == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(res.trace.events[1].t == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  // Removed: the widened trapezoid below z=3 minus the already empty hole.
  const double removed = 4 * ((3 + 5.25) / 2 * 2.25 - 1.5);
  CHECK(volume(res.body) == doctest::Approx(80 - removed).epsilon(1e-12));
  CHECK(res.trace.final_report.valid);
}

TEST_CASE("push-pull errors") {
  CHECK_THROWS_AS(apply_push_pull(cube(), req({"nope"}, Motion::translate({0, 0, 1}))), Error);
  CHECK_THROWS_AS(apply_push_pull(cube(), req({}, Motion::translate({0, 0, 1}))), Error);
}

TEST_CASE("identity motion returns the input") {
  for (const auto& name : {"box", "vslot", "slotted_block"}) {
    Body b = make_fixture(name, {});
    auto res = apply_push_pull(b, req({b.faces[0].tag}, Motion::translate({0, 0, 0})));
    CHECK(symdiff_volume(res.body, b) <= 1e-9);
  }
}

TEST_CASE("linear volume law without events") {
  Body b = make_fixture("box", {{"w", 2}, {"d", 3}, {"h", 1}});
  for (double s : {0.1, 0.35, 0.8}) {
    auto up = apply_push_pull(b, req({"top"}, Motion::translate({0, 0, s})));
    CHECK(std::abs(volume(up.body) - (6 + 6 * s)) <= 1e-9);
    auto down = apply_push_pull(b, req({"right"}, Motion::translate({-s, 0, 0})));
    CHECK(std::abs(volume(down.body) - (6 - 3 * s)) <= 1e-9);
  }
  Body step = make_fixture("step_block", {});
  auto ledge = apply_push_pull(step, req({"ledge"}, Motion::translate({0, 0, 0.1})));
  CHECK(symdiff_volume(ledge.body, step) == doctest::Approx(0.1 * 4).epsilon(1e-9));
}

TEST_CASE("composition at a non-event parameter") {
  struct Case {
    const char* fixture;
    std::vector<std::string> tags;
    Motion motion;
    double s;
  };
  std::vector<Case> cases = {
      {"slotted_block", {"top"}, Motion::translate({0, 0, -4}), 0.6},
      {"rot_wedge_base", {"top"}, Motion::rotate({2, 0, 2}, {0, 1, 0}, deg(20)), 0.4},
      {"vslot", {"slot_left", "slot_right"}, Motion::translate({0.5, 0, 0}), 0.3},
  };
  for (const auto& c : cases) {
    Body b = make_fixture(c.fixture, {});
    auto one = apply_push_pull(b, req(c.tags, c.motion));
    auto first = apply_push_pull(b, req(c.tags, c.motion.restricted(c.s)));
    auto second = apply_push_pull(first.body, req(c.tags, c.motion.remaining(c.s)));
    CHECK(symdiff_volume(one.body, second.body) <= 1e-9);
  }
}

TEST_CASE("local reversibility without events") {
  Body b = make_fixture("rot_wedge_base", {});
  auto r = req({"top"}, Motion::rotate({2, 0, 2}, {0, 1, 0}, deg(20)));
  auto fwd = apply_push_pull(b, r);
  REQUIRE(fwd.trace.events.empty());
  r.motion = r.motion.inverse();
  auto back = apply_push_pull(fwd.body, r);
  CHECK(symdiff_volume(back.body, b) <= 1e-9);

  Body v = make_fixture("vslot", {});
  auto rv = req({"slot_left", "slot_right"}, Motion::screw({0.2, 0, 0.1}, {2, 1, 1}, {0, 1, 0}, deg(5)));
  auto fv = apply_push_pull(v, rv);
  if (fv.trace.events.empty()) {
    rv.motion = rv.motion.inverse();
    auto bv = apply_push_pull(fv.body, rv);
    CHECK(symdiff_volume(bv.body, v) <= 1e-9);
  }
}

TEST_CASE("trace bookkeeping") {
  Body b = make_fixture("dovetail_over_holes", {});
  auto res = apply_push_pull(b, req({"dt_floor"}, Motion::translate({0, 0, -2.25})));
  const auto& tr = res.trace;
  REQUIRE(tr.step_t.size() == tr.events.size() + 2);
  CHECK(tr.step_t.front() == 0.0);
  CHECK(tr.step_t.back() == 1.0);
  for (size_t i = 1; i < tr.step_t.size(); ++i) CHECK(tr.step_t[i] > tr.step_t[i - 1]);
  CHECK(tr.volumes.size() == tr.step_t.size());
  CHECK(tr.intervals.size() == tr.events.size() + 1);
  for (const auto& iv : tr.intervals) {
    CHECK(iv.front_area > 0);
    for (const auto& a : iv.auxes) CHECK(validate(a.body).valid);
  }
}

#include "ppdm/fixtures.hpp"

#include <cmath>

#include "ppdm/builder.hpp"
#include "ppdm/error.hpp"
#include "ppdm/validate.hpp"

namespace ppdm {

namespace {

Point3 at(const Vec2& p, double y) { return {p.x, y, p.y}; }

void addRingWalls(const Profile::Ring& ring, double depth, std::vector<SoupPolygon>& soup) {
  const size_t n = ring.points.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = ring.points[i];
    const Vec2& b = ring.points[(i + 1) % n];
    Vec3 nrm = normalized(Vec3{b.y - a.y, 0.0, -(b.x - a.x)});
    SoupPolygon poly;
    poly.points = {at(a, 0.0), at(b, 0.0), at(b, depth), at(a, depth)};
    poly.plane = Plane{nrm, dot(nrm, at(a, 0.0))};
    poly.tag = ring.tags.at(i);
    soup.push_back(std::move(poly));
  }
}

void addCap(const Profile& profile, double y, bool back, std::vector<SoupPolygon>& soup) {
  Plane pl = back ? Plane{{0, 1, 0}, y} : Plane{{0, -1, 0}, -y};
  std::string tag = back ? "back" : "front";
  if (profile.holes.empty()) {
    SoupPolygon poly{{}, pl, tag};
    for (const Vec2& p : profile.outer.points) poly.points.push_back(at(p, y));
    soup.push_back(std::move(poly));
    return;
  }
  std::vector<std::vector<Vec2>> loops{profile.outer.points};
  std::vector<Vec2> flat = profile.outer.points;
  for (const auto& h : profile.holes) {
    loops.push_back(h.points);
    flat.insert(flat.end(), h.points.begin(), h.points.end());
  }
  for (const auto& tri : triangulate(loops))
    soup.push_back({{at(flat[tri[0]], y), at(flat[tri[1]], y), at(flat[tri[2]], y)}, pl, tag});
}

double get(const Params& p, const std::string& key) { return p.at(key); }

Profile::Ring ring(std::vector<Vec2> pts, std::vector<std::string> tags) { return {std::move(pts), std::move(tags)}; }

Profile boxProfile(double w, double h) {
  return {ring({{0, 0}, {w, 0}, {w, h}, {0, h}}, {"bottom", "right", "top", "left"}), {}};
}

const std::map<std::string, Params>& defaults() {
  static const std::map<std::string, Params> table = {
      {"box", {{"w", 1}, {"d", 1}, {"h", 1}}},
      {"step_block", {{"w", 4}, {"d", 2}, {"h", 2}, {"step_x", 2}, {"step_z", 1}}},
      {"slotted_block",
       {{"size", 4}, {"hole_x0", 1}, {"hole_x1", 3}, {"hole_z0", 1}, {"hole_z1", 2}}},
      {"vslot", {{"w", 4}, {"d", 2}, {"h", 2}, {"slot_x0", 1}, {"slot_x1", 3}, {"apex_z", 1}}},
      {"dovetail_over_holes", {{"d", 4}}},
      {"crank_step", {{"d", 2}}},
      {"notch_block", {{"d", 2}, {"apex_z", 1}}},
      {"rot_wedge_base", {{"w", 4}, {"d", 2}, {"h", 2}}},
  };
  return table;
}

}  // namespace

Body extrude(const Profile& profile, double depth) {
  std::vector<SoupPolygon> soup;
  addRingWalls(profile.outer, depth, soup);
  for (const auto& h : profile.holes) addRingWalls(h, depth, soup);
  addCap(profile, 0.0, false, soup);
  addCap(profile, depth, true, soup);
  return canonicalize(buildBody(soup));
}

std::vector<std::string> fixture_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : defaults()) out.push_back(k);
  return out;
}

Params fixture_defaults(const std::string& name) {
  auto it = defaults().find(name);
  if (it == defaults().end()) throw Error(ErrorCode::kInvalidArgument, "unknown fixture: " + name);
  return it->second;
}

Body make_fixture(const std::string& name, const Params& params) {
  Params p = fixture_defaults(name);
  for (const auto& [k, v] : params) {
    if (!p.count(k)) throw Error(ErrorCode::kInvalidArgument, "fixture " + name + " has no parameter " + k);
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "parameter " + k + " is not finite");
    p[k] = v;
  }
  const double d = name == "slotted_block" ? get(p, "size") : get(p, "d");
  Profile prof;
  if (name == "box" || name == "rot_wedge_base") {
    prof = boxProfile(get(p, "w"), get(p, "h"));
  } else if (name == "step_block") {
    double w = get(p, "w"), h = get(p, "h"), sx = get(p, "step_x"), sz = get(p, "step_z");
    prof.outer = ring({{0, 0}, {w, 0}, {w, sz}, {sx, sz}, {sx, h}, {0, h}},
                      {"bottom", "right", "ledge", "riser", "top", "left"});
  } else if (name == "slotted_block") {
    double s = get(p, "size"), x0 = get(p, "hole_x0"), x1 = get(p, "hole_x1");
    double z0 = get(p, "hole_z0"), z1 = get(p, "hole_z1");
    prof = boxProfile(s, s);
    prof.holes.push_back(ring({{x0, z0}, {x0, z1}, {x1, z1}, {x1, z0}},
                              {"hole_left", "hole_top", "hole_right", "hole_bottom"}));
  } else if (name == "vslot") {
    double w = get(p, "w"), h = get(p, "h"), x0 = get(p, "slot_x0"), x1 = get(p, "slot_x1");
    double az = get(p, "apex_z");
    prof.outer = ring({{0, 0}, {w, 0}, {w, h}, {x1, h}, {0.5 * (x0 + x1), az}, {x0, h}, {0, h}},
                      {"bottom", "right", "top_right", "slot_right", "slot_left", "top_left", "left"});
  } else if (name == "dovetail_over_holes") {
    prof.outer = ring({{0, 0}, {6, 0}, {6, 4}, {4, 4}, {4.5, 3}, {1.5, 3}, {2, 4}, {0, 4}},
                      {"bottom", "right", "top_right", "dt_right", "dt_floor", "dt_left", "top_left", "left"});
    prof.holes.push_back(ring({{2, 1.5}, {2, 2.25}, {4, 2.25}, {4, 1.5}},
                              {"hole_left", "hole_top", "hole_right", "hole_bottom"}));
  } else if (name == "crank_step") {
    prof.outer = ring({{0, 0}, {6, 0}, {6, 2}, {5, 3}, {1, 3}, {0, 2}},
                      {"bottom", "F5", "F3", "F1", "F2", "F4"});
  } else if (name == "notch_block") {
    prof.outer = ring({{0, 0}, {4, 0}, {4, 2}, {3, get(p, "apex_z")}, {2, 2}, {0, 2}},
                      {"bottom", "right", "notch_r", "notch_l", "top", "left"});
  }
  Body body;
  try {
    if (!(d > 0)) throw Error(ErrorCode::kInvalidArgument, "depth must be positive");
    body = extrude(prof, d);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidArgument, "fixture " + name + " parameters are degenerate: " + e.what());
  }
  auto rep = validate(body);
  if (!rep.valid)
    throw Error(ErrorCode::kInvalidArgument,
                "fixture " + name + " parameters are degenerate: " + rep.violations.front().message);
  return body;
}

}  // namespace ppdm

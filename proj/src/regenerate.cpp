#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "ppdm/error.hpp"
#include "ppdm/pushpull.hpp"

namespace ppdm {

const char* ill_bounded_name(IllBoundedKind k) {
  return k == IllBoundedKind::kOpenBoundary ? "open_boundary" : "extra_intersection";
}

bool IllBoundedReport::has(IllBoundedKind kind) const {
  return std::any_of(entries.begin(), entries.end(), [&](const IllBoundedEntry& e) { return e.kind == kind; });
}

bool IllBoundedReport::has(IllBoundedKind kind, const std::string& tag) const {
  return std::any_of(entries.begin(), entries.end(),
                     [&](const IllBoundedEntry& e) { return e.kind == kind && e.tag == tag; });
}

double workspaceScale(const PushPullRequest& request) {
  if (request.workspace_scale > 0) return request.workspace_scale;
  if (const char* env = std::getenv("PPDM_MODELING_SPACE_SCALE")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0 && std::isfinite(v)) return v;
  }
  return kDefaultWorkspaceScale;
}

namespace {

double scaleOf(const Body& b) {
  double s = 1.0;
  for (const auto& v : b.vertices) s = std::max({s, std::abs(v.point.x), std::abs(v.point.y), std::abs(v.point.z)});
  return s;
}

std::vector<std::vector<int>> vertexFaces(const Body& body) {
  std::vector<std::vector<int>> out(body.vertices.size());
  for (int f = 0; f < static_cast<int>(body.faces.size()); ++f)
    for (const Loop& l : body.faces[f].loops)
      for (const LoopUse& u : l.uses) {
        auto& list = out[body.useStart(u)];
        if (list.empty() || list.back() != f) list.push_back(f);
      }
  for (auto& l : out) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  return out;
}

bool onAll(const std::vector<Plane>& planes, const Point3& p, double tol) {
  for (const auto& pl : planes)
    if (std::abs(pl.signedDistance(p)) > tol) return false;
  return true;
}

}  // namespace

bool regenerateGeometry(const Body& body, const std::set<std::string>& pp_tags, const Rigid& transform, Body& out,
                        std::vector<int>* failed) {
  out = body;
  std::vector<bool> moving(body.faces.size(), false);
  for (int f = 0; f < static_cast<int>(body.faces.size()); ++f) {
    if (!pp_tags.count(body.faces[f].tag)) continue;
    moving[f] = true;
    out.planes.push_back(transform.apply(body.facePlane(f)));
    out.faces[f].plane = static_cast<int>(out.planes.size()) - 1;
    out.faces[f].same_sense = true;
  }
  const double tol = kEpsGeom * scaleOf(body);
  auto vf = vertexFaces(body);
  bool ok = true;
  for (int v = 0; v < static_cast<int>(body.vertices.size()); ++v) {
    bool affected = std::any_of(vf[v].begin(), vf[v].end(), [&](int f) { return moving[f]; });
    if (!affected) continue;
    std::vector<Plane> planes;
    for (int f : vf[v]) {
      Plane pl = out.facePlane(f);
      bool dup = std::any_of(planes.begin(), planes.end(), [&](const Plane& q) { return coplanar(q, pl, 1e-7, tol); });
      if (!dup) planes.push_back(pl);
    }
    const Point3 old = body.vertices[v].point;
    Point3 p;
    bool solved = false;
    if (planes.size() == 3) {
      solved = solve3(planes[0].normal, planes[1].normal, planes[2].normal,
                      {planes[0].offset, planes[1].offset, planes[2].offset}, p);
    } else if (planes.size() > 3) {
      // Least squares over all incident planes, then require consistency.
      Vec3 r0, r1, r2, rhs;
      for (const auto& pl : planes) {
        const Vec3& n = pl.normal;
        r0 = r0 + n * n.x;
        r1 = r1 + n * n.y;
        r2 = r2 + n * n.z;
        rhs = rhs + n * pl.offset;
      }
      solved = solve3(r0, r1, r2, rhs, p);
      if (solved && !onAll(planes, p, tol * 10))
        throw Error(ErrorCode::kNonManifoldVertex,
                    "vertex " + std::to_string(v) + " has " + std::to_string(planes.size()) +
                        " incident planes that no longer meet in a point");
    }
    if (!solved) {
      Point3 moved = transform.apply(old);
      if (onAll(planes, moved, tol)) p = moved, solved = true;
      else if (onAll(planes, old, tol)) p = old, solved = true;
    }
    if (!solved) {
      ok = false;
      if (failed) failed->push_back(v);
      continue;
    }
    out.vertices[v].point = p;
  }
  return ok;
}

namespace {

void addEntry(IllBoundedReport& r, const Body& b, IllBoundedKind k, int f, const std::string& msg) {
  for (const auto& e : r.entries)
    if (e.face == f && e.kind == k) return;
  r.entries.push_back({k, f, b.faces[f].tag, msg});
}

// A face that turned inside out: decide whether its moved boundary went into
// material held by a fixed neighbour (inserted connection) or out past one
// (lost connection).
void diagnoseFlip(const Body& regen, const std::set<std::string>& pp_tags, int f, IllBoundedReport& r, double tol) {
  std::set<int> movedVerts;
  for (const Loop& l : regen.faces[f].loops)
    for (const LoopUse& u : l.uses) {
      int v = regen.useStart(u);
      for (int g = 0; g < static_cast<int>(regen.faces.size()); ++g) {
        if (!pp_tags.count(regen.faces[g].tag)) continue;
        for (const Loop& gl : regen.faces[g].loops)
          for (const LoopUse& gu : gl.uses)
            if (regen.useStart(gu) == v) movedVerts.insert(v);
      }
    }
  std::set<int> fixedNei;
  for (int g : neighbors(regen, {f}))
    if (!pp_tags.count(regen.faces[g].tag)) fixedNei.insert(g);
  std::vector<int> inside, outside;
  for (int g : fixedNei) {
    Plane pl = regen.facePlane(g);
    for (int v : movedVerts) {
      double d = pl.signedDistance(regen.vertices[v].point);
      if (d > tol) outside.push_back(g);
      if (d < -tol) inside.push_back(g);
    }
  }
  if (!outside.empty()) {
    addEntry(r, regen, IllBoundedKind::kOpenBoundary, f, "face boundary no longer closes");
    for (int g : outside) addEntry(r, regen, IllBoundedKind::kOpenBoundary, g, "neighbor no longer reaches the moved face");
  } else {
    addEntry(r, regen, IllBoundedKind::kExtraIntersection, f, "face boundary crosses itself");
    for (int g : inside) addEntry(r, regen, IllBoundedKind::kExtraIntersection, g, "moved face cuts into this face");
  }
}

}  // namespace

RegenResult regenerate(const Body& body, const std::set<std::string>& pp_tags, const Rigid& transform) {
  for (const auto& tag : pp_tags)
    if (body.facesWithTag(tag).empty()) throw Error(ErrorCode::kUnknownEntity, "no face tagged " + tag);
  RegenResult res;
  std::vector<int> failed;
  bool solved = regenerateGeometry(body, pp_tags, transform, res.body, &failed);
  const double tol = kEpsGeom * scaleOf(res.body);
  if (!solved) {
    for (int v : failed)
      for (int f = 0; f < static_cast<int>(body.faces.size()); ++f)
        for (const Loop& l : body.faces[f].loops)
          for (const LoopUse& u : l.uses)
            if (body.useStart(u) == v)
              addEntry(res.report, body, IllBoundedKind::kOpenBoundary, f,
                       "incident planes of vertex " + std::to_string(v) + " do not meet");
    return res;
  }
  auto rep = validate(res.body);
  if (rep.valid) {
    res.ok = true;
    return res;
  }
  for (const auto& viol : rep.violations) {
    switch (viol.kind) {
      case ViolationKind::kOrientation:
      case ViolationKind::kDegenerateFace:
        diagnoseFlip(res.body, pp_tags, viol.entities.at(0), res.report, tol);
        break;
      case ViolationKind::kSelfIntersection:
      case ViolationKind::kHoleOutside:
      case ViolationKind::kInterference:
        for (int f : viol.entities) addEntry(res.report, res.body, IllBoundedKind::kExtraIntersection, f, viol.message);
        break;
      case ViolationKind::kEdgeUse:
      case ViolationKind::kVertexFan:
      case ViolationKind::kOffPlane:
      case ViolationKind::kOpenLoop:
      case ViolationKind::kStructural:
        if (viol.condition == 1 && !viol.entities.empty())
          addEntry(res.report, res.body, IllBoundedKind::kOpenBoundary, viol.entities[0], viol.message);
        break;
    }
  }
  if (res.report.empty()) {
    // Edge/vertex level failures: report on the pp faces.
    for (int f = 0; f < static_cast<int>(res.body.faces.size()); ++f)
      if (pp_tags.count(res.body.faces[f].tag))
        addEntry(res.report, res.body, IllBoundedKind::kOpenBoundary, f, rep.violations.front().message);
  }
  return res;
}

}  // namespace ppdm

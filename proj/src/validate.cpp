#include "ppdm/validate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "ppdm/polygon.hpp"

namespace ppdm {

bool ValidityReport::has(int condition) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.condition == condition; });
}
bool ValidityReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

namespace {

void add(ValidityReport& r, int cond, ViolationKind kind, std::vector<int> ids, std::string msg) {
  r.valid = false;
  r.violations.push_back({cond, kind, std::move(ids), std::move(msg)});
}

double modelScale(const Body& b) {
  double s = 1.0;
  for (const auto& v : b.vertices) s = std::max({s, std::abs(v.point.x), std::abs(v.point.y), std::abs(v.point.z)});
  return s;
}

struct Interval {
  double lo, hi;
};

/// Closed set of line parameters where line (q + s·d) meets the face.
std::vector<Interval> lineFaceIntervals(const Body& body, int f, const Point3& q, const Vec3& d, double tol) {
  Vec3 m = normalized(cross(body.facePlane(f).normal, d));
  std::vector<Interval> out;
  std::vector<double> crossings;
  for (const Loop& loop : body.faces[f].loops) {
    auto pts = body.loopPoints(loop);
    const size_t n = pts.size();
    for (size_t i = 0; i < n; ++i) {
      const Point3& a = pts[i];
      const Point3& b = pts[(i + 1) % n];
      double sa = dot(a - q, m), sb = dot(b - q, m);
      double ta = dot(a - q, d), tb = dot(b - q, d);
      bool za = std::abs(sa) <= tol, zb = std::abs(sb) <= tol;
      if (za && zb) out.push_back({std::min(ta, tb), std::max(ta, tb)});
      else if (za) out.push_back({ta, ta});
      bool aboveA = za || sa > 0, aboveB = zb || sb > 0;
      if (aboveA != aboveB) {
        double t;
        if (za) t = ta;
        else if (zb) t = tb;
        else t = ta + (tb - ta) * sa / (sa - sb);
        crossings.push_back(t);
      }
    }
  }
  std::sort(crossings.begin(), crossings.end());
  for (size_t i = 0; i + 1 < crossings.size(); i += 2) out.push_back({crossings[i], crossings[i + 1]});
  return out;
}

bool covered(const Interval& piece, std::vector<Interval> allowed, double tol) {
  std::sort(allowed.begin(), allowed.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double reach = piece.lo;
  bool started = false;
  for (const auto& a : allowed) {
    if (a.hi < piece.lo - tol) continue;
    if (a.lo > reach + tol) break;
    if (!started && a.lo > piece.lo + tol) break;
    started = true;
    reach = std::max(reach, a.hi);
    if (reach >= piece.hi - tol) return true;
  }
  return started && reach >= piece.hi - tol;
}

void checkFaceLoops(const Body& body, int f, double tol, ValidityReport& r) {
  const Face& face = body.faces[f];
  Plane pl = body.facePlane(f);
  double scaleTol = tol;
  // Planarity and orientation.
  for (size_t li = 0; li < face.loops.size(); ++li) {
    const Loop& loop = face.loops[li];
    auto pts = body.loopPoints(loop);
    for (const LoopUse& u : loop.uses) {
      int v = body.useStart(u);
      if (std::abs(pl.signedDistance(body.vertices[v].point)) > scaleTol) {
        add(r, 1, ViolationKind::kOffPlane, {f, v}, "vertex " + std::to_string(v) + " off plane of face " + std::to_string(f));
      }
    }
    double a = dot(vectorArea(pts), pl.normal);
    double areaTol = scaleTol * scaleTol;
    if (std::abs(a) <= areaTol) {
      add(r, 1, ViolationKind::kDegenerateFace, {f}, "face " + std::to_string(f) + " has a zero-area loop");
    } else if ((li == 0) != (a > 0)) {
      add(r, 1, ViolationKind::kOrientation, {f},
          "face " + std::to_string(f) + (li == 0 ? " outer loop is not counter-clockwise" : " hole loop is not clockwise"));
    }
  }

  // Simple loops that do not cross each other.
  PlaneFrame frame(pl);
  struct Seg {
    int a, b;
    Vec2 pa, pb;
  };
  std::vector<Seg> segs;
  std::vector<std::vector<Vec2>> loops2d;
  for (const Loop& loop : face.loops) {
    auto ids = body.loopVertices(loop);
    std::vector<Vec2> l2;
    for (size_t i = 0; i < ids.size(); ++i) {
      int a = ids[i], b = ids[(i + 1) % ids.size()];
      segs.push_back({a, b, frame.to2d(body.vertices[a].point), frame.to2d(body.vertices[b].point)});
      l2.push_back(segs.back().pa);
    }
    loops2d.push_back(std::move(l2));
  }
  bool crossed = false;
  for (size_t i = 0; i < segs.size() && !crossed; ++i) {
    for (size_t j = i + 1; j < segs.size() && !crossed; ++j) {
      const Seg &s = segs[i], &t = segs[j];
      int shared = -1;
      if (s.a == t.a || s.a == t.b) shared = s.a;
      if (s.b == t.a || s.b == t.b) shared = (shared < 0) ? s.b : -2;
      bool bad;
      if (shared == -2) {
        bad = true;  // duplicated segment
      } else if (shared >= 0) {
        const Vec2& sOther = (s.a == shared) ? s.pb : s.pa;
        const Vec2& tOther = (t.a == shared) ? t.pb : t.pa;
        bad = pointSegmentDistance2d(sOther, t.pa, t.pb) <= tol || pointSegmentDistance2d(tOther, s.pa, s.pb) <= tol;
      } else {
        double d = std::min({pointSegmentDistance2d(s.pa, t.pa, t.pb), pointSegmentDistance2d(s.pb, t.pa, t.pb),
                             pointSegmentDistance2d(t.pa, s.pa, s.pb), pointSegmentDistance2d(t.pb, s.pa, s.pb)});
        double o1 = cross2(s.pb - s.pa, t.pa - s.pa), o2 = cross2(s.pb - s.pa, t.pb - s.pa);
        double o3 = cross2(t.pb - t.pa, s.pa - t.pa), o4 = cross2(t.pb - t.pa, s.pb - t.pa);
        bool proper = ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
        bad = proper || d <= tol;
      }
      if (bad) {
        crossed = true;
        add(r, 1, ViolationKind::kSelfIntersection, {f}, "face " + std::to_string(f) + " boundary intersects itself");
      }
    }
  }
  if (!crossed) {
    for (size_t h = 1; h < loops2d.size(); ++h) {
      for (const Vec2& p : loops2d[h]) {
        auto loc = locatePoint2d({loops2d[0]}, p, tol);
        if (loc == PointLocation::kBoundary) continue;
        if (loc == PointLocation::kOutside)
          add(r, 1, ViolationKind::kHoleOutside, {f}, "face " + std::to_string(f) + " hole lies outside its outer loop");
        break;
      }
    }
  }
}

void checkInterference(const Body& body, double tol, ValidityReport& r) {
  const int nf = static_cast<int>(body.faces.size());
  std::vector<std::pair<Point3, Point3>> box(nf);
  std::vector<std::set<int>> fv(nf), fe(nf);
  for (int f = 0; f < nf; ++f) {
    bool first = true;
    for (const Loop& l : body.faces[f].loops)
      for (const LoopUse& u : l.uses) {
        fe[f].insert(u.edge);
        int v = body.useStart(u);
        fv[f].insert(v);
        const Point3& p = body.vertices[v].point;
        if (first) box[f] = {p, p}, first = false;
        for (int i = 0; i < 3; ++i) {
          box[f].first[i] = std::min(box[f].first[i], p[i]);
          box[f].second[i] = std::max(box[f].second[i], p[i]);
        }
      }
  }
  std::vector<PolygonWithHoles> polys;
  for (int f = 0; f < nf; ++f) polys.push_back(facePolygon(body, f));

  for (int f = 0; f < nf; ++f) {
    for (int g = f + 1; g < nf; ++g) {
      bool disjoint = false;
      for (int i = 0; i < 3; ++i)
        if (box[f].second[i] < box[g].first[i] - tol || box[g].second[i] < box[f].first[i] - tol) disjoint = true;
      if (disjoint) continue;
      Plane pf = polys[f].plane, pg = polys[g].plane;
      Vec3 dir = cross(pf.normal, pg.normal);
      double s = norm(dir);
      bool hit = false;
      if (s < 1e-12) {
        if (!coplanar(pf, pg, 1e-7, tol)) continue;
        // Coplanar: interiors must not overlap.
        for (const auto& tri : triangulateFace(polys[f])) {
          Point3 c = (tri[0] + tri[1] + tri[2]) / 3.0;
          if (norm(cross(tri[1] - tri[0], tri[2] - tri[0])) <= tol * tol) continue;
          if (locateOnFace(polys[g], c, tol) == PointLocation::kInside) {
            hit = true;
            break;
          }
        }
        if (!hit)
          for (const auto& tri : triangulateFace(polys[g])) {
            Point3 c = (tri[0] + tri[1] + tri[2]) / 3.0;
            if (norm(cross(tri[1] - tri[0], tri[2] - tri[0])) <= tol * tol) continue;
            if (locateOnFace(polys[f], c, tol) == PointLocation::kInside) {
              hit = true;
              break;
            }
          }
      } else {
        Vec3 d = dir / s;
        Point3 q;
        Vec3 third = d;
        if (!solve3(pf.normal, pg.normal, third, {pf.offset, pg.offset, dot(third, box[f].first)}, q)) continue;
        auto If = lineFaceIntervals(body, f, q, d, tol);
        auto Ig = lineFaceIntervals(body, g, q, d, tol);
        if (If.empty() || Ig.empty()) continue;
        std::vector<Interval> allowed;
        for (int e : fe[f]) {
          if (!fe[g].count(e)) continue;
          const Point3& a = body.vertices[body.edges[e].v0].point;
          const Point3& b = body.vertices[body.edges[e].v1].point;
          if (norm(cross(a - q, d)) > tol || norm(cross(b - q, d)) > tol) continue;
          double ta = dot(a - q, d), tb = dot(b - q, d);
          allowed.push_back({std::min(ta, tb), std::max(ta, tb)});
        }
        for (int v : fv[f]) {
          if (!fv[g].count(v)) continue;
          const Point3& a = body.vertices[v].point;
          if (norm(cross(a - q, d)) > tol) continue;
          double ta = dot(a - q, d);
          allowed.push_back({ta, ta});
        }
        for (const auto& a : If) {
          for (const auto& b : Ig) {
            Interval piece{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
            if (piece.hi < piece.lo - tol) continue;
            if (piece.hi < piece.lo) piece.hi = piece.lo = 0.5 * (piece.lo + piece.hi);
            if (!covered(piece, allowed, tol)) {
              hit = true;
              break;
            }
          }
          if (hit) break;
        }
      }
      if (hit)
        add(r, 4, ViolationKind::kInterference, {f, g},
            "faces " + std::to_string(f) + " and " + std::to_string(g) + " intersect away from shared edges");
    }
  }
}

}  // namespace

ValidityReport validateStructure(const Body& body) {
  ValidityReport r;
  const int nv = static_cast<int>(body.vertices.size());
  const int ne = static_cast<int>(body.edges.size());
  for (int e = 0; e < ne; ++e) {
    const Edge& ed = body.edges[e];
    if (ed.v0 < 0 || ed.v0 >= nv || ed.v1 < 0 || ed.v1 >= nv)
      add(r, 0, ViolationKind::kStructural, {e}, "edge " + std::to_string(e) + " references a missing vertex");
  }
  for (int f = 0; f < static_cast<int>(body.faces.size()); ++f) {
    const Face& face = body.faces[f];
    if (face.plane < 0 || face.plane >= static_cast<int>(body.planes.size()))
      add(r, 0, ViolationKind::kStructural, {f}, "face " + std::to_string(f) + " references a missing plane");
    if (face.loops.empty()) add(r, 0, ViolationKind::kStructural, {f}, "face " + std::to_string(f) + " has no loops");
    for (const Loop& l : face.loops)
      for (const LoopUse& u : l.uses)
        if (u.edge < 0 || u.edge >= ne)
          add(r, 0, ViolationKind::kStructural, {f}, "face " + std::to_string(f) + " references a missing edge");
  }
  for (const Shell& s : body.shells)
    for (int f : s.faces)
      if (f < 0 || f >= static_cast<int>(body.faces.size()))
        add(r, 0, ViolationKind::kStructural, {f}, "shell references a missing face");
  for (const Lump& l : body.lumps)
    for (int s : l.shells)
      if (s < 0 || s >= static_cast<int>(body.shells.size()))
        add(r, 0, ViolationKind::kStructural, {s}, "lump references a missing shell");
  if (!r.valid) return r;

  for (int f = 0; f < static_cast<int>(body.faces.size()); ++f) {
    for (const Loop& l : body.faces[f].loops) {
      if (l.uses.size() < 3) {
        add(r, 1, ViolationKind::kOpenLoop, {f}, "face " + std::to_string(f) + " has a loop with fewer than 3 edges");
        continue;
      }
      for (size_t i = 0; i < l.uses.size(); ++i) {
        if (body.useEnd(l.uses[i]) != body.useStart(l.uses[(i + 1) % l.uses.size()])) {
          add(r, 1, ViolationKind::kOpenLoop, {f}, "face " + std::to_string(f) + " has an open loop");
          break;
        }
      }
    }
  }
  return r;
}

ValidityReport validate(const Body& body) {
  ValidityReport r = validateStructure(body);
  if (r.has(0)) return r;
  if (body.faces.empty()) return r;  // the empty solid
  const double tol = kEpsGeom * modelScale(body);

  for (int f = 0; f < static_cast<int>(body.faces.size()); ++f) checkFaceLoops(body, f, tol, r);

  // Condition 2: each edge used exactly twice, in opposite senses.
  std::vector<std::vector<std::pair<int, bool>>> uses(body.edges.size());
  for (int f = 0; f < static_cast<int>(body.faces.size()); ++f)
    for (const Loop& l : body.faces[f].loops)
      for (const LoopUse& u : l.uses) uses[u.edge].push_back({f, u.forward});
  bool edgeOk = true;
  for (int e = 0; e < static_cast<int>(body.edges.size()); ++e) {
    const auto& us = uses[e];
    if (us.size() != 2) {
      edgeOk = false;
      add(r, 2, ViolationKind::kEdgeUse, {e},
          "edge " + std::to_string(e) + " is used by " + std::to_string(us.size()) + " face loops");
    } else if (us[0].second == us[1].second) {
      edgeOk = false;
      add(r, 2, ViolationKind::kEdgeUse, {e}, "edge " + std::to_string(e) + " is used twice in the same sense");
    }
  }

  // Condition 3: corners around each vertex chain into a single fan.
  if (edgeOk) {
    std::map<int, std::vector<std::pair<int, int>>> corners;  // v -> (in edge, out edge)
    for (const Face& face : body.faces)
      for (const Loop& l : face.loops)
        for (size_t i = 0; i < l.uses.size(); ++i) {
          const LoopUse& in = l.uses[(i + l.uses.size() - 1) % l.uses.size()];
          const LoopUse& out = l.uses[i];
          corners[body.useStart(out)].push_back({in.edge, out.edge});
        }
    for (auto& [v, cs] : corners) {
      std::map<int, std::vector<int>> byEdge;
      for (int k = 0; k < static_cast<int>(cs.size()); ++k) {
        byEdge[cs[k].first].push_back(k);
        byEdge[cs[k].second].push_back(k);
      }
      std::vector<int> parent(cs.size());
      std::iota(parent.begin(), parent.end(), 0);
      std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
      for (auto& [e, ks] : byEdge)
        for (size_t k = 1; k < ks.size(); ++k) parent[find(ks[k])] = find(ks[0]);
      std::set<int> roots;
      for (int k = 0; k < static_cast<int>(cs.size()); ++k) roots.insert(find(k));
      if (roots.size() != 1)
        add(r, 3, ViolationKind::kVertexFan, {v}, "faces around vertex " + std::to_string(v) + " form more than one fan");
    }
  }

  checkInterference(body, tol, r);
  return r;
}

}  // namespace ppdm

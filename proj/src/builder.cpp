#include "ppdm/builder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "ppdm/error.hpp"
#include "ppdm/mass.hpp"
#include "ppdm/polygon.hpp"

namespace ppdm {

namespace {

constexpr double kWeldTol = kEpsGeom;

class VertexWelder {
 public:
  int add(const Point3& p) {
    auto key = cellOf(p);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = grid_.find(hash({key[0] + dx, key[1] + dy, key[2] + dz}));
          if (it == grid_.end()) continue;
          for (int id : it->second)
            if (distance(points[id], p) <= kWeldTol) return id;
        }
    int id = static_cast<int>(points.size());
    points.push_back(p);
    grid_[hash(key)].push_back(id);
    return id;
  }

  std::vector<Point3> points;

 private:
  static constexpr double kCell = 1e-6;
  static std::array<long long, 3> cellOf(const Point3& p) {
    return {static_cast<long long>(std::floor(p.x / kCell)), static_cast<long long>(std::floor(p.y / kCell)),
            static_cast<long long>(std::floor(p.z / kCell))};
  }
  static unsigned long long hash(const std::array<long long, 3>& k) {
    return static_cast<unsigned long long>(k[0]) * 73856093ull ^ static_cast<unsigned long long>(k[1]) * 19349663ull ^
           static_cast<unsigned long long>(k[2]) * 83492791ull;
  }
  std::unordered_map<unsigned long long, std::vector<int>> grid_;
};

struct Piece {
  std::vector<int> ids;
  int group = -1;
  int priority = 0;
};

struct BuiltFace {
  int group;
  std::vector<std::vector<int>> loops;  // loops[0] outer
  int priority;
};

double clockwiseAngle(const Vec2& from, const Vec2& to) {
  double a = std::atan2(cross2(to, from), from.x * to.x + from.y * to.y);
  if (a <= 1e-15) a += 2 * M_PI;
  return a;
}

}  // namespace

Body buildBody(const std::vector<SoupPolygon>& soup) {
  // Canonical oriented planes, one per coplanar same-side group.
  std::vector<Plane> groups;
  std::vector<std::string> groupTag;
  VertexWelder welder;
  std::vector<Piece> pieces;

  for (int pi = 0; pi < static_cast<int>(soup.size()); ++pi) {
    const SoupPolygon& sp = soup[pi];
    if (sp.points.size() < 3) continue;
    int g = -1;
    for (int k = 0; k < static_cast<int>(groups.size()); ++k)
      if (samePlane(groups[k], sp.plane)) {
        g = k;
        break;
      }
    if (g < 0) {
      g = static_cast<int>(groups.size());
      groups.push_back(sp.plane);
      groupTag.push_back(sp.tag);
    }
    std::vector<Point3> pts = sp.points;
    if (dot(vectorArea(pts), sp.plane.normal) < 0) std::reverse(pts.begin(), pts.end());
    Piece piece;
    piece.group = g;
    piece.priority = pi;
    for (const auto& p : pts) {
      int id = welder.add(p);
      if (!piece.ids.empty() && piece.ids.back() == id) continue;
      piece.ids.push_back(id);
    }
    while (piece.ids.size() > 1 && piece.ids.front() == piece.ids.back()) piece.ids.pop_back();
    if (piece.ids.size() >= 3) pieces.push_back(std::move(piece));
  }
  const auto& P = welder.points;

  // Split edges at T-junctions: any welded vertex lying inside an edge.
  std::vector<int> byX(P.size());
  std::iota(byX.begin(), byX.end(), 0);
  std::sort(byX.begin(), byX.end(), [&](int a, int b) { return P[a].x < P[b].x; });
  std::vector<double> xs(byX.size());
  for (size_t i = 0; i < byX.size(); ++i) xs[i] = P[byX[i]].x;

  for (Piece& piece : pieces) {
    std::vector<int> out;
    const size_t n = piece.ids.size();
    for (size_t i = 0; i < n; ++i) {
      int a = piece.ids[i], b = piece.ids[(i + 1) % n];
      out.push_back(a);
      const Point3 &pa = P[a], &pb = P[b];
      Vec3 ab = pb - pa;
      double len2 = dot(ab, ab);
      if (len2 == 0) continue;
      double lo = std::min(pa.x, pb.x) - kWeldTol, hi = std::max(pa.x, pb.x) + kWeldTol;
      auto first = std::lower_bound(xs.begin(), xs.end(), lo);
      std::vector<std::pair<double, int>> inner;
      for (auto it = first; it != xs.end() && *it <= hi; ++it) {
        int q = byX[it - xs.begin()];
        if (q == a || q == b) continue;
        double t = dot(P[q] - pa, ab) / len2;
        if (t <= 0 || t >= 1) continue;
        if (distance(P[q], pa + ab * t) > kWeldTol) continue;
        inner.push_back({t, q});
      }
      std::sort(inner.begin(), inner.end());
      for (auto& [t, q] : inner)
        if (out.back() != q) out.push_back(q);
    }
    piece.ids = std::move(out);
  }

  // Per plane group: cancel opposite directed edges, chain the remainder.
  std::vector<BuiltFace> faces;
  for (int g = 0; g < static_cast<int>(groups.size()); ++g) {
    std::map<std::pair<int, int>, std::pair<int, int>> directed;  // (count, min priority)
    for (const Piece& piece : pieces) {
      if (piece.group != g) continue;
      const size_t n = piece.ids.size();
      for (size_t i = 0; i < n; ++i) {
        int a = piece.ids[i], b = piece.ids[(i + 1) % n];
        if (a == b) continue;
        auto rev = directed.find({b, a});
        if (rev != directed.end() && rev->second.first > 0) {
          if (--rev->second.first == 0) directed.erase(rev);
          continue;
        }
        auto& slot = directed[{a, b}];
        if (slot.first == 0) slot.second = piece.priority;
        slot.first++;
        slot.second = std::min(slot.second, piece.priority);
      }
    }
    if (directed.empty()) continue;

    PlaneFrame frame(groups[g]);
    std::map<int, std::vector<std::pair<int, int>>> outgoing;  // v -> (target, priority)
    for (auto& [e, cp] : directed)
      for (int k = 0; k < cp.first; ++k) outgoing[e.first].push_back({e.second, cp.second});

    std::vector<std::pair<std::vector<int>, int>> loops;
    for (auto& [start, outs] : outgoing) {
      while (!outs.empty()) {
        std::vector<int> loop{start};
        int prio = outs.back().second;
        int cur = outs.back().first;
        outs.pop_back();
        int prev = start;
        int guard = 0;
        while (cur != start && guard++ < 1000000) {
          loop.push_back(cur);
          auto& cand = outgoing[cur];
          if (cand.empty()) break;
          Vec2 back = frame.to2d(P[prev]) - frame.to2d(P[cur]);
          size_t best = 0;
          double bestAngle = 1e300;
          for (size_t k = 0; k < cand.size(); ++k) {
            Vec2 d = frame.to2d(P[cand[k].first]) - frame.to2d(P[cur]);
            double ang = clockwiseAngle(back, d);
            if (ang < bestAngle) {
              bestAngle = ang;
              best = k;
            }
          }
          prev = cur;
          prio = std::min(prio, cand[best].second);
          cur = cand[best].first;
          cand.erase(cand.begin() + best);
        }
        if (cur == start && loop.size() >= 3) loops.push_back({loop, prio});
      }
    }

    // Classify loops by signed area; attach holes to the smallest container.
    std::vector<int> outers, holes;
    std::vector<double> areas(loops.size());
    std::vector<std::vector<Vec2>> loops2d(loops.size());
    for (size_t k = 0; k < loops.size(); ++k) {
      for (int id : loops[k].first) loops2d[k].push_back(frame.to2d(P[id]));
      areas[k] = signedArea2d(loops2d[k]);
      if (areas[k] > 1e-18) outers.push_back(int(k));
      else if (areas[k] < -1e-18) holes.push_back(int(k));
    }
    std::map<int, BuiltFace> byOuter;
    for (int o : outers) byOuter[o] = BuiltFace{g, {loops[o].first}, loops[o].second};
    for (int h : holes) {
      int bestOuter = -1;
      double bestArea = 1e300;
      for (int o : outers) {
        bool inside = false, decided = false;
        for (const Vec2& q : loops2d[h]) {
          auto loc = locatePoint2d({loops2d[o]}, q, kEpsGeom);
          if (loc == PointLocation::kBoundary) continue;
          inside = loc == PointLocation::kInside;
          decided = true;
          break;
        }
        if (!decided) {
          const auto& l = loops2d[h];
          for (size_t i = 0; i < l.size() && !decided; ++i) {
            Vec2 mid{(l[i].x + l[(i + 1) % l.size()].x) / 2, (l[i].y + l[(i + 1) % l.size()].y) / 2};
            auto loc = locatePoint2d({loops2d[o]}, mid, kEpsGeom);
            if (loc == PointLocation::kBoundary) continue;
            inside = loc == PointLocation::kInside;
            decided = true;
          }
        }
        if (inside && areas[o] < bestArea) {
          bestArea = areas[o];
          bestOuter = o;
        }
      }
      if (bestOuter < 0) throw Error(ErrorCode::kRobustnessFailure, "hole loop without containing face loop");
      byOuter[bestOuter].loops.push_back(loops[h].first);
      byOuter[bestOuter].priority = std::min(byOuter[bestOuter].priority, loops[h].second);
    }
    for (auto& [o, f] : byOuter) faces.push_back(std::move(f));
  }

  // Drop collinear vertices of degree two in the global edge graph.
  for (bool changed = true; changed;) {
    changed = false;
    std::map<int, std::set<int>> adj;
    for (const auto& f : faces)
      for (const auto& l : f.loops)
        for (size_t i = 0; i < l.size(); ++i) {
          int a = l[i], b = l[(i + 1) % l.size()];
          adj[a].insert(b);
          adj[b].insert(a);
        }
    std::set<int> removable;
    for (auto& [v, nb] : adj) {
      if (nb.size() != 2) continue;
      int u = *nb.begin(), w = *nb.rbegin();
      if (pointSegmentDistance(P[v], P[u], P[w]) <= kWeldTol && distance(P[u], P[w]) > kWeldTol) removable.insert(v);
    }
    if (removable.empty()) break;
    for (auto& f : faces)
      for (auto& l : f.loops) {
        std::vector<int> kept;
        for (int id : l)
          if (!removable.count(id)) kept.push_back(id);
        if (kept.size() >= 3 && kept.size() != l.size()) {
          l = std::move(kept);
          changed = true;
        }
      }
    // Only remove vertices that were dropped everywhere; otherwise stop to stay consistent.
    if (!changed) break;
  }

  // Assemble the Body.
  Body body;
  std::map<int, int> vmap;
  auto vid = [&](int w) {
    auto it = vmap.find(w);
    if (it != vmap.end()) return it->second;
    int id = static_cast<int>(body.vertices.size());
    body.vertices.push_back({P[w]});
    vmap[w] = id;
    return id;
  };
  std::map<std::pair<int, int>, int> edgeIds;
  std::vector<int> groupPlane(groups.size(), -1);
  std::vector<bool> groupSense(groups.size(), true);
  for (int g = 0; g < static_cast<int>(groups.size()); ++g) {
    for (int k = 0; k < static_cast<int>(body.planes.size()); ++k) {
      if (samePlane(body.planes[k], groups[g])) {
        groupPlane[g] = k;
        groupSense[g] = true;
        break;
      }
      if (samePlane(body.planes[k], groups[g].flipped())) {
        groupPlane[g] = k;
        groupSense[g] = false;
        break;
      }
    }
    if (groupPlane[g] < 0) {
      groupPlane[g] = static_cast<int>(body.planes.size());
      body.planes.push_back(groups[g]);
    }
  }
  for (const BuiltFace& bf : faces) {
    Face face;
    face.plane = groupPlane[bf.group];
    face.same_sense = groupSense[bf.group];
    face.tag = soup[bf.priority].tag;
    for (const auto& l : bf.loops) {
      Loop loop;
      for (size_t i = 0; i < l.size(); ++i) {
        int a = vid(l[i]), b = vid(l[(i + 1) % l.size()]);
        auto key = std::minmax(a, b);
        auto it = edgeIds.find({key.first, key.second});
        int e;
        if (it == edgeIds.end()) {
          e = static_cast<int>(body.edges.size());
          body.edges.push_back({key.first, key.second});
          edgeIds[{key.first, key.second}] = e;
        } else {
          e = it->second;
        }
        loop.uses.push_back({e, body.edges[e].v0 == a});
      }
      face.loops.push_back(std::move(loop));
    }
    body.faces.push_back(std::move(face));
  }

  // Shells from edge connectivity.
  const int nf = static_cast<int>(body.faces.size());
  std::vector<int> parent(nf);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto ef = edgeFaces(body);
  for (const auto& fs : ef)
    for (size_t k = 1; k < fs.size(); ++k) parent[find(fs[k])] = find(fs[0]);
  std::map<int, std::vector<int>> comps;
  for (int f = 0; f < nf; ++f) comps[find(f)].push_back(f);
  std::vector<double> shellVolume;
  for (auto& [root, fs] : comps) {
    Shell s;
    s.faces = fs;
    double v = faceSetVolume(body, fs);
    s.outer = v > 0;
    shellVolume.push_back(v);
    body.shells.push_back(std::move(s));
  }
  std::vector<int> outerShells;
  for (int s = 0; s < static_cast<int>(body.shells.size()); ++s)
    if (body.shells[s].outer) outerShells.push_back(s);
  std::map<int, Lump> lumps;
  for (int s : outerShells) lumps[s].shells.push_back(s);
  for (int s = 0; s < static_cast<int>(body.shells.size()); ++s) {
    if (body.shells[s].outer) continue;
    const Face& f0 = body.faces[body.shells[s].faces[0]];
    Point3 probe = body.vertices[body.useStart(f0.loops[0].uses[0])].point;
    int best = -1;
    double bestVol = 1e300;
    for (int o : outerShells) {
      if (windingNumber(body, body.shells[o].faces, probe) > 0.5 && shellVolume[o] < bestVol) {
        bestVol = shellVolume[o];
        best = o;
      }
    }
    if (best < 0) throw Error(ErrorCode::kRobustnessFailure, "void shell outside every outer shell");
    lumps[best].shells.push_back(s);
  }
  for (auto& [s, l] : lumps) body.lumps.push_back(std::move(l));
  return canonicalize(body);
}

std::vector<SoupPolygon> toSoup(const Body& body) {
  std::vector<SoupPolygon> out;
  for (int f = 0; f < static_cast<int>(body.faces.size()); ++f) {
    PolygonWithHoles poly = facePolygon(body, f);
    if (poly.loops.size() == 1) {
      out.push_back({poly.loops[0], poly.plane, body.faces[f].tag});
      continue;
    }
    for (const auto& tri : triangulateFace(poly)) out.push_back({{tri[0], tri[1], tri[2]}, poly.plane, body.faces[f].tag});
  }
  return out;
}

Body canonicalize(const Body& in) {
  const int nf = static_cast<int>(in.faces.size());
  std::vector<Point3> centroid(nf);
  for (int f = 0; f < nf; ++f) {
    Vec3 c;
    auto pts = in.loopPoints(in.faces[f].loops[0]);
    for (const auto& p : pts) c += p;
    centroid[f] = pts.empty() ? c : c / double(pts.size());
  }
  auto quant = [](double v) { return std::round(v * 1e6); };
  std::vector<int> order(nf);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    auto ka = std::make_tuple(in.faces[a].tag, quant(centroid[a].x), quant(centroid[a].y), quant(centroid[a].z));
    auto kb = std::make_tuple(in.faces[b].tag, quant(centroid[b].x), quant(centroid[b].y), quant(centroid[b].z));
    return ka < kb;
  });
  std::vector<int> faceMap(nf);
  for (int k = 0; k < nf; ++k) faceMap[order[k]] = k;

  Body out;
  std::map<int, int> vmap, emap, pmap;
  for (int k = 0; k < nf; ++k) {
    const Face& src = in.faces[order[k]];
    Face f;
    f.same_sense = src.same_sense;
    f.tag = src.tag;
    auto pit = pmap.find(src.plane);
    if (pit == pmap.end()) {
      f.plane = static_cast<int>(out.planes.size());
      pmap[src.plane] = f.plane;
      out.planes.push_back(in.planes[src.plane]);
    } else {
      f.plane = pit->second;
    }
    for (const Loop& l : src.loops) {
      // Rotate each loop so it starts at its smallest original-vertex position.
      Loop loop;
      for (const LoopUse& u : l.uses) {
        for (int v : {in.edges[u.edge].v0, in.edges[u.edge].v1}) {
          if (!vmap.count(v)) {
            int id = static_cast<int>(out.vertices.size());
            vmap[v] = id;
            out.vertices.push_back(in.vertices[v]);
          }
        }
        auto eit = emap.find(u.edge);
        int e;
        if (eit == emap.end()) {
          e = static_cast<int>(out.edges.size());
          emap[u.edge] = e;
          out.edges.push_back({vmap[in.edges[u.edge].v0], vmap[in.edges[u.edge].v1]});
        } else {
          e = eit->second;
        }
        loop.uses.push_back({e, u.forward});
      }
      f.loops.push_back(std::move(loop));
    }
    out.faces.push_back(std::move(f));
  }
  for (const Shell& s : in.shells) {
    Shell ns;
    ns.outer = s.outer;
    for (int f : s.faces) ns.faces.push_back(faceMap[f]);
    std::sort(ns.faces.begin(), ns.faces.end());
    out.shells.push_back(std::move(ns));
  }
  std::vector<int> shellOrder(out.shells.size());
  std::iota(shellOrder.begin(), shellOrder.end(), 0);
  std::sort(shellOrder.begin(), shellOrder.end(),
            [&](int a, int b) { return out.shells[a].faces.front() < out.shells[b].faces.front(); });
  std::vector<int> shellMap(out.shells.size());
  std::vector<Shell> sortedShells;
  for (size_t k = 0; k < shellOrder.size(); ++k) {
    shellMap[shellOrder[k]] = static_cast<int>(k);
    sortedShells.push_back(out.shells[shellOrder[k]]);
  }
  out.shells = std::move(sortedShells);
  for (const Lump& l : in.lumps) {
    Lump nl;
    for (int s : l.shells) nl.shells.push_back(shellMap[s]);
    if (nl.shells.size() > 1) std::sort(nl.shells.begin() + 1, nl.shells.end());
    out.lumps.push_back(std::move(nl));
  }
  std::sort(out.lumps.begin(), out.lumps.end(),
            [](const Lump& a, const Lump& b) { return a.shells.front() < b.shells.front(); });
  return out;
}

Body reversed(const Body& body) {
  Body out = body;
  for (Face& f : out.faces) {
    f.same_sense = !f.same_sense;
    for (Loop& l : f.loops) {
      std::reverse(l.uses.begin(), l.uses.end());
      for (LoopUse& u : l.uses) u.forward = !u.forward;
    }
  }
  for (Shell& s : out.shells) s.outer = !s.outer;
  return out;
}

}  // namespace ppdm

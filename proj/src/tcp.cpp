#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "ppdm/error.hpp"
#include "ppdm/polygon.hpp"
#include "ppdm/pushpull.hpp"

namespace ppdm {

const char* tcp_kind_name(TcpKind k) {
  switch (k) {
    case TcpKind::kNewConnectionInner: return "new_connection_inner";
    case TcpKind::kNewConnectionOuter: return "new_connection_outer";
    case TcpKind::kLostConnectionTangency: return "lost_connection_tangency";
    case TcpKind::kLostConnectionWorkspace: return "lost_connection_workspace";
  }
  return "?";
}

Rigid relativeTransform(const Motion& motion, double t_from, double t) {
  return transformAt(motion, t).compose(transformAt(motion, t_from).inverse());
}

std::vector<PushPullContext> merge_adjacent_faces(const Body& body, const std::vector<std::string>& tags) {
  std::vector<int> faces;
  for (const auto& tag : tags) {
    auto fs = body.facesWithTag(tag);
    if (fs.empty()) throw Error(ErrorCode::kUnknownEntity, "no face tagged " + tag);
    faces.insert(faces.end(), fs.begin(), fs.end());
  }
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  std::map<int, int> parent;
  for (int f : faces) parent[f] = f;
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& users : edgeFaces(body))
    for (size_t i = 0; i < users.size(); ++i)
      for (size_t j = i + 1; j < users.size(); ++j)
        if (parent.count(users[i]) && parent.count(users[j])) parent[find(users[i])] = find(users[j]);
  std::map<int, std::set<int>> groups;
  for (int f : faces) groups[find(f)].insert(f);
  std::vector<PushPullContext> out;
  for (auto& [root, group] : groups) {
    PushPullContext ctx;
    ctx.pp_faces = group;
    ctx.nei_faces = neighbors(body, group);
    std::set<std::string> ts;
    for (int f : group) {
      ts.insert(body.faces[f].tag);
      ctx.start_surfaces.push_back(body.facePlane(f));
    }
    ctx.pp_tags.assign(ts.begin(), ts.end());
    ctx.merged = group.size() > 1;
    out.push_back(std::move(ctx));
  }
  return out;
}

std::vector<PushPullContext> merge_adjacent_faces(const Body& body, const PushPullRequest& request) {
  return merge_adjacent_faces(body, request.tags);
}

namespace {

std::set<std::string> allTags(const std::vector<PushPullContext>& contexts) {
  std::set<std::string> out;
  for (const auto& c : contexts) out.insert(c.pp_tags.begin(), c.pp_tags.end());
  return out;
}

double scaleOf(const Body& b) {
  double s = 1.0;
  for (const auto& v : b.vertices) s = std::max({s, std::abs(v.point.x), std::abs(v.point.y), std::abs(v.point.z)});
  return s;
}

std::vector<double> rootsIn(const MovingPlane& mp, const EventConstraint& c, double t_from) {
  std::vector<double> out;
  try {
    for (double t : event_roots(mp, c, t_from, 1.0))
      if (t > t_from + kEpsT && t < 1.0 - kEpsT) out.push_back(t);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateConstraint) throw;
  }
  return out;
}

int kindRank(TcpKind k) {
  switch (k) {
    case TcpKind::kLostConnectionTangency: return 0;
    case TcpKind::kLostConnectionWorkspace: return 1;
    case TcpKind::kNewConnectionInner: return 2;
    case TcpKind::kNewConnectionOuter: return 3;
  }
  return 4;
}

}  // namespace

RegenSignature regenSignature(const Body& body, const std::set<std::string>& pp_tags, const Motion& motion,
                              double t_from, double t, const ModelingSpaceBox& box) {
  RegenSignature sig;
  try {
    Body regen;
    if (!regenerateGeometry(body, pp_tags, relativeTransform(motion, t_from, t), regen)) return sig;
    sig.in_box = std::all_of(regen.vertices.begin(), regen.vertices.end(),
                             [&](const Vertex& v) { return box.contains(v.point); });
    sig.valid = validate(regen).valid;
    if (sig.valid) sig.topology = topologySignature(regen);
  } catch (const Error&) {
    sig = RegenSignature{};
  }
  return sig;
}

std::vector<TcpCandidate> tcp_candidates(const Body& body, const std::vector<PushPullContext>& contexts,
                                         const Motion& motion, double t_from, const ModelingSpaceBox& box) {
  std::vector<TcpCandidate> out;
  const std::set<std::string> tags = allTags(contexts);
  const double tol = kEpsGeom * scaleOf(body);
  const Rigid back = transformAt(motion, t_from).inverse();
  std::map<double, Body> regenCache;
  auto regenAt = [&](double t) -> const Body* {
    auto it = regenCache.find(t);
    if (it == regenCache.end()) {
      Body b;
      bool ok = false;
      try {
        ok = regenerateGeometry(body, tags, relativeTransform(motion, t_from, t), b);
      } catch (const Error&) {
        ok = false;
      }
      it = regenCache.emplace(t, ok ? std::move(b) : Body{}).first;
    }
    return it->second.faces.empty() ? nullptr : &it->second;
  };

  std::set<int> inner;
  for (const auto& ctx : contexts) {
    inner.insert(ctx.pp_faces.begin(), ctx.pp_faces.end());
    inner.insert(ctx.nei_faces.begin(), ctx.nei_faces.end());
  }
  std::map<int, std::vector<int>> outerVertexFaces;
  for (int f = 0; f < static_cast<int>(body.faces.size()); ++f) {
    if (inner.count(f)) continue;
    for (const Loop& l : body.faces[f].loops)
      for (const LoopUse& u : l.uses) outerVertexFaces[body.useStart(u)].push_back(f);
  }

  for (const auto& ctx : contexts) {
    std::vector<int> nei(ctx.nei_faces.begin(), ctx.nei_faces.end());
    std::vector<Plane> seen;
    for (int f : ctx.pp_faces) {
      Plane cur = body.facePlane(f);
      if (std::any_of(seen.begin(), seen.end(), [&](const Plane& q) { return samePlane(q, cur); })) continue;
      seen.push_back(cur);
      MovingPlane mp{back.apply(cur), motion};

      // (i) the moving plane reaches a fixed line where two neighbours meet
      for (size_t i = 0; i < nei.size(); ++i)
        for (size_t j = i + 1; j < nei.size(); ++j) {
          auto pp = plane_plane_intersect(body.facePlane(nei[i]), body.facePlane(nei[j]));
          if (pp.kind != PlanePairKind::kLine) continue;
          for (double t : rootsIn(mp, EventConstraint::lineContainment(pp.line), t_from))
            out.push_back({t, TcpKind::kNewConnectionInner, {f, nei[i], nei[j]}});
        }

      // (ii) an outer-group vertex is met by the moved face
      for (const auto& [v, faces] : outerVertexFaces) {
        const Point3& p = body.vertices[v].point;
        for (double t : rootsIn(mp, EventConstraint::pointCrossing(p), t_from)) {
          const Body* regen = regenAt(t);
          if (!regen) continue;
          if (locateOnFace(facePolygon(*regen, f), p, tol * 10) == PointLocation::kOutside) continue;
          std::vector<int> ents{f};
          ents.insert(ents.end(), faces.begin(), faces.end());
          out.push_back({t, TcpKind::kNewConnectionOuter, ents});
        }
      }

      // (iii) the moving plane turns parallel to a neighbour
      if (motion.rotates())
        for (int g : nei)
          for (double t : rootsIn(mp, EventConstraint::parallelism(body.facePlane(g)), t_from))
            out.push_back({t, TcpKind::kLostConnectionTangency, {f, g}});
    }

    // (iv) a regenerated vertex leaves the modeling space
    std::set<int> ppVerts;
    for (int f : ctx.pp_faces)
      for (const Loop& l : body.faces[f].loops)
        for (const LoopUse& u : l.uses) ppVerts.insert(body.useStart(u));
    for (int v : ppVerts) {
      std::vector<Plane> fixed;
      int movingFace = -1;
      for (int g = 0; g < static_cast<int>(body.faces.size()); ++g) {
        bool incident = false;
        for (const Loop& l : body.faces[g].loops)
          for (const LoopUse& u : l.uses) incident |= body.useStart(u) == v;
        if (!incident) continue;
        if (tags.count(body.faces[g].tag)) {
          movingFace = g;
          continue;
        }
        Plane pl = body.facePlane(g);
        if (fixed.size() == 1 && norm(cross(fixed[0].normal, pl.normal)) < 1e-7) continue;
        if (fixed.size() < 2) fixed.push_back(pl);
      }
      if (fixed.size() < 2 || movingFace < 0) continue;
      MovingPlane mp{back.apply(body.facePlane(movingFace)), motion};
      for (double t : rootsIn(mp, EventConstraint::boxExit(fixed[0], fixed[1], box), t_from))
        out.push_back({t, TcpKind::kLostConnectionWorkspace, {movingFace}});
    }
  }
  std::sort(out.begin(), out.end(), [](const TcpCandidate& a, const TcpCandidate& b) {
    return a.t != b.t ? a.t < b.t : kindRank(a.kind) < kindRank(b.kind);
  });
  return out;
}

namespace {

TcpEvent makeEvent(const Body& body, const std::vector<TcpCandidate>& group) {
  TcpEvent ev;
  ev.t = group.front().t;
  const TcpCandidate* best = &group.front();
  for (const auto& c : group)
    if (kindRank(c.kind) < kindRank(best->kind)) best = &c;
  ev.kind = best->kind;
  std::set<int> ents;
  std::set<TcpKind> kinds;
  for (const auto& c : group) {
    ents.insert(c.faces.begin(), c.faces.end());
    if (c.kind != ev.kind) kinds.insert(c.kind);
  }
  ev.entities.assign(ents.begin(), ents.end());
  for (int f : ev.entities) ev.entity_tags.push_back(body.faces[f].tag);
  ev.coincident.assign(kinds.begin(), kinds.end());
  ev.confirmed = true;
  return ev;
}

}  // namespace

std::optional<TcpEvent> detect_next_tcp(const Body& body, const std::vector<PushPullContext>& contexts,
                                        const Motion& motion, double t_from, const ModelingSpaceBox& box) {
  const std::set<std::string> tags = allTags(contexts);
  auto sigAt = [&](double t) { return regenSignature(body, tags, motion, t_from, t, box); };
  auto cands = tcp_candidates(body, contexts, motion, t_from, box);

  std::optional<TcpEvent> found;
  for (size_t i = 0; i < cands.size();) {
    size_t j = i;
    while (j < cands.size() && cands[j].t - cands[i].t <= kEpsT) ++j;
    std::vector<TcpCandidate> group(cands.begin() + i, cands.begin() + j);
    double t = group.front().t;
    double lo = std::max(t_from, t - kEpsConfirm), hi = std::min(1.0, t + kEpsConfirm);
    if (!(sigAt(lo) == sigAt(hi))) {
      found = makeEvent(body, group);
      break;
    }
    i = j;
  }

  // Sweep for changes no candidate explained.
  const double t_end = found ? found->t : 1.0;
  const RegenSignature start = sigAt(std::min(t_from + kEpsConfirm, t_end));
  const int samples = 64;
  double prev = t_from;
  for (int k = 1; k <= samples; ++k) {
    double t = std::min(t_from + (t_end - t_from) * k / samples, t_end - 2 * kEpsConfirm);
    if (t <= prev) continue;
    if (!(sigAt(t) == start)) {
      double a = prev, b = t;
      while (b - a > kEpsT) {
        double m = 0.5 * (a + b);
        if (sigAt(m) == start) a = m;
        else b = m;
      }
      if (b >= 1.0 - kEpsT) break;
      TcpEvent ev;
      ev.t = b;
      RegenResult r;
      try {
        r = regenerate(body, tags, relativeTransform(motion, t_from, std::min(1.0, b + kEpsConfirm)));
      } catch (const Error&) {
      }
      bool inner = false;
      std::set<int> ents;
      for (const auto& e : r.report.entries) ents.insert(e.face);
      for (const auto& ctx : contexts)
        for (int f : ents) inner |= ctx.pp_faces.count(f) || ctx.nei_faces.count(f);
      if (!sigAt(b).in_box && start.in_box) ev.kind = TcpKind::kLostConnectionWorkspace;
      else if (r.report.has(IllBoundedKind::kExtraIntersection)) ev.kind = inner ? TcpKind::kNewConnectionInner : TcpKind::kNewConnectionOuter;
      else ev.kind = TcpKind::kLostConnectionTangency;
      ev.entities.assign(ents.begin(), ents.end());
      for (int f : ev.entities) ev.entity_tags.push_back(body.faces[f].tag);
      ev.confirmed = true;
      return ev;
    }
    prev = t;
  }
  return found;
}

std::optional<TcpEvent> detect_next_tcp(const Body& body, const PushPullContext& context, const Motion& motion,
                                        double t_from) {
  ModelingSpaceBox box = modelingSpace(body, kDefaultWorkspaceScale);
  return detect_next_tcp(body, std::vector<PushPullContext>{context}, motion, t_from, box);
}

}  // namespace ppdm

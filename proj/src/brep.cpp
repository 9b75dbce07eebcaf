#include "ppdm/brep.hpp"

#include <algorithm>
#include <functional>

#include "ppdm/error.hpp"

namespace ppdm {

const char* code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kUnknownEntity: return "unknown_entity";
    case ErrorCode::kInvalidBody: return "invalid_body";
    case ErrorCode::kRobustnessFailure: return "robustness_failure";
    case ErrorCode::kDegenerateConstraint: return "degenerate_constraint";
    case ErrorCode::kNonManifoldVertex: return "non_manifold_vertex";
    case ErrorCode::kInternalInvariant: return "internal_invariant";
    case ErrorCode::kSchema: return "schema_error";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
    case ErrorCode::kUnsupported: return "unsupported";
  }
  return "unknown";
}

bool solve3(const Vec3& r0, const Vec3& r1, const Vec3& r2, const Vec3& rhs, Vec3& out, double tol) {
  Vec3 c12 = cross(r1, r2);
  double det = dot(r0, c12);
  double scale = norm(r0) * norm(r1) * norm(r2);
  if (scale == 0.0 || std::abs(det) <= tol * scale) return false;
  Vec3 c20 = cross(r2, r0), c01 = cross(r0, r1);
  out = (c12 * rhs.x + c20 * rhs.y + c01 * rhs.z) / det;
  return true;
}

bool samePlane(const Plane& a, const Plane& b, double angleTol, double offsetTol) {
  return norm(a.normal - b.normal) < angleTol && std::abs(a.offset - b.offset) < offsetTol;
}

bool coplanar(const Plane& a, const Plane& b, double angleTol, double offsetTol) {
  return samePlane(a, b, angleTol, offsetTol) || samePlane(a, b.flipped(), angleTol, offsetTol);
}

std::vector<int> Body::loopVertices(const Loop& loop) const {
  std::vector<int> out;
  out.reserve(loop.uses.size());
  for (const LoopUse& u : loop.uses) out.push_back(useStart(u));
  return out;
}

std::vector<Point3> Body::loopPoints(const Loop& loop) const {
  std::vector<Point3> out;
  out.reserve(loop.uses.size());
  for (const LoopUse& u : loop.uses) out.push_back(vertices[useStart(u)].point);
  return out;
}

std::vector<int> Body::facesWithTag(const std::string& tag) const {
  std::vector<int> out;
  for (int f = 0; f < static_cast<int>(faces.size()); ++f)
    if (faces[f].tag == tag) out.push_back(f);
  return out;
}

std::set<std::string> Body::tags() const {
  std::set<std::string> out;
  for (const Face& f : faces) out.insert(f.tag);
  return out;
}

bool Body::bounds(Point3& lo, Point3& hi) const {
  if (vertices.empty()) return false;
  lo = hi = vertices.front().point;
  for (const Vertex& v : vertices) {
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], v.point[i]);
      hi[i] = std::max(hi[i], v.point[i]);
    }
  }
  return true;
}

PolygonWithHoles facePolygon(const Body& body, int face) {
  PolygonWithHoles poly;
  poly.plane = body.facePlane(face);
  for (const Loop& loop : body.faces[face].loops) poly.loops.push_back(body.loopPoints(loop));
  return poly;
}

std::vector<std::vector<int>> edgeFaces(const Body& body) {
  std::vector<std::vector<int>> out(body.edges.size());
  for (int f = 0; f < static_cast<int>(body.faces.size()); ++f)
    for (const Loop& loop : body.faces[f].loops)
      for (const LoopUse& u : loop.uses)
        if (u.edge >= 0 && u.edge < static_cast<int>(out.size())) out[u.edge].push_back(f);
  return out;
}

std::set<int> neighbors(const Body& body, const std::set<int>& faces) {
  for (int f : faces)
    if (f < 0 || f >= static_cast<int>(body.faces.size()))
      throw Error(ErrorCode::kUnknownEntity, "unknown face id " + std::to_string(f));
  auto ef = edgeFaces(body);
  std::set<int> out;
  for (int f : faces)
    for (const Loop& loop : body.faces[f].loops)
      for (const LoopUse& u : loop.uses)
        for (int g : ef[u.edge])
          if (!faces.count(g)) out.insert(g);
  return out;
}

TopologySignature topologySignature(const Body& body) {
  TopologySignature sig;
  sig.faces = static_cast<int>(body.faces.size());
  sig.edges = static_cast<int>(body.edges.size());
  sig.vertices = static_cast<int>(body.vertices.size());
  sig.shells = static_cast<int>(body.shells.size());
  sig.lumps = static_cast<int>(body.lumps.size());

  // Relabeling-invariant: hash each face by tag, loop sizes and neighbor tags.
  auto ef = edgeFaces(body);
  std::vector<std::string> items;
  for (int f = 0; f < sig.faces; ++f) {
    std::string s = body.faces[f].tag + "|";
    std::vector<int> sizes;
    for (const Loop& l : body.faces[f].loops) sizes.push_back(static_cast<int>(l.uses.size()));
    std::sort(sizes.begin(), sizes.end());
    for (int n : sizes) s += std::to_string(n) + ",";
    std::vector<std::string> nb;
    for (const Loop& l : body.faces[f].loops)
      for (const LoopUse& u : l.uses)
        for (int g : ef[u.edge])
          if (g != f) nb.push_back(body.faces[g].tag);
    std::sort(nb.begin(), nb.end());
    s += "|";
    for (const auto& t : nb) s += t + ",";
    items.push_back(std::move(s));
  }
  std::sort(items.begin(), items.end());
  unsigned long long h = 1469598103934665603ull;
  for (const auto& s : items) {
    h ^= std::hash<std::string>{}(s);
    h *= 1099511628211ull;
  }
  sig.adjacency = h;
  return sig;
}

}  // namespace ppdm

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ppdm/vec.hpp"

namespace ppdm {

/// Oriented plane: p lies on it iff normal·p == offset.
struct Plane {
  Vec3 normal{0, 0, 1};
  double offset = 0.0;

  double signedDistance(const Point3& p) const { return dot(normal, p) - offset; }
  Plane flipped() const { return {-normal, -offset}; }
  Point3 project(const Point3& p) const { return p - normal * signedDistance(p); }
  Point3 anyPoint() const { return normal * offset; }
  static Plane through(const Point3& p, const Vec3& unitNormal) { return {unitNormal, dot(unitNormal, p)}; }
};

/// True when the planes denote the same surface with the same orientation.
bool samePlane(const Plane& a, const Plane& b, double angleTol = 1e-7, double offsetTol = kEpsGeom);
/// True when the planes denote the same surface, either orientation.
bool coplanar(const Plane& a, const Plane& b, double angleTol = 1e-7, double offsetTol = kEpsGeom);

struct Vertex {
  Point3 point;
};

struct Edge {
  int v0 = -1;
  int v1 = -1;
};

struct LoopUse {
  int edge = -1;
  bool forward = true;
};

/// Outer loops run counter-clockwise seen against the outward normal, holes clockwise.
struct Loop {
  std::vector<LoopUse> uses;
};

struct Face {
  int plane = -1;
  bool same_sense = true;
  std::vector<Loop> loops;  // loops[0] is the outer boundary
  std::string tag;          // persistent identity inherited from the generating plane
};

struct Shell {
  std::vector<int> faces;
  bool outer = true;
};

struct Lump {
  std::vector<int> shells;  // shells[0] is the outer shell
};

/// Planar boundary representation. Entity ids are indices into the tables.
/// Bodies are treated as immutable values by every algorithm in the library.
struct Body {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Plane> planes;
  std::vector<Face> faces;
  std::vector<Shell> shells;
  std::vector<Lump> lumps;

  bool empty() const { return faces.empty(); }

  /// Outward-oriented plane of a face.
  Plane facePlane(int f) const {
    const Face& face = faces[f];
    return face.same_sense ? planes[face.plane] : planes[face.plane].flipped();
  }
  /// Start vertex of a loop use, honouring the traversal sense.
  int useStart(const LoopUse& u) const { return u.forward ? edges[u.edge].v0 : edges[u.edge].v1; }
  int useEnd(const LoopUse& u) const { return u.forward ? edges[u.edge].v1 : edges[u.edge].v0; }

  /// Vertex ids of a loop in traversal order.
  std::vector<int> loopVertices(const Loop& loop) const;
  std::vector<Point3> loopPoints(const Loop& loop) const;

  std::vector<int> facesWithTag(const std::string& tag) const;
  std::set<std::string> tags() const;

  /// Axis-aligned bounds; returns false for an empty body.
  bool bounds(Point3& lo, Point3& hi) const;
};

/// A planar polygon with holes, all loops given as point lists. Used to
/// hand face geometry to tessellation, clipping and point tests.
struct PolygonWithHoles {
  Plane plane;  // outward orientation; outer loop is CCW about plane.normal
  std::vector<std::vector<Point3>> loops;
};

PolygonWithHoles facePolygon(const Body& body, int face);

/// Face ids sharing at least one edge with any input face, excluding the
/// inputs. Throws kUnknownEntity for bad ids.
std::set<int> neighbors(const Body& body, const std::set<int>& faces);

/// Map edge id -> face ids using it (in loop order of discovery).
std::vector<std::vector<int>> edgeFaces(const Body& body);

/// Counts plus an adjacency hash; equal signatures mean the same topology graph.
struct TopologySignature {
  int faces = 0, edges = 0, vertices = 0, shells = 0, lumps = 0;
  unsigned long long adjacency = 0;
  bool operator==(const TopologySignature&) const = default;
};
TopologySignature topologySignature(const Body& body);

}  // namespace ppdm

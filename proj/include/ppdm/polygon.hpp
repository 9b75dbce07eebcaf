#pragma once

#include <array>
#include <vector>

#include "ppdm/brep.hpp"

namespace ppdm {

struct Vec2 {
  double x = 0.0, y = 0.0;
};
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline double cross2(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

/// Orthonormal in-plane frame with u × v == normal, so CCW about the normal
/// stays CCW in 2D.
struct PlaneFrame {
  Vec3 origin, u, v, n;
  explicit PlaneFrame(const Plane& p);
  Vec2 to2d(const Point3& p) const { return {dot(p - origin, u), dot(p - origin, v)}; }
  Point3 to3d(const Vec2& q) const { return origin + u * q.x + v * q.y; }
};

double signedArea2d(const std::vector<Vec2>& loop);
/// Vector area (Newell); its dot with the plane normal is the signed area.
Vec3 vectorArea(const std::vector<Point3>& loop);

enum class PointLocation { kInside, kOutside, kBoundary };

/// Classifies a point against a 2D polygon with holes (even-odd over all loops).
PointLocation locatePoint2d(const std::vector<std::vector<Vec2>>& loops, const Vec2& p, double tol);
/// Same, for a point already on (or near) the polygon's plane.
PointLocation locateOnFace(const PolygonWithHoles& poly, const Point3& p, double tol = kEpsGeom);

/// Distance from p to segment ab.
double pointSegmentDistance(const Point3& p, const Point3& a, const Point3& b);
double pointSegmentDistance2d(const Vec2& p, const Vec2& a, const Vec2& b);

/// Ear-clipping triangulation with hole bridging. Loops follow the
/// orientation convention of PolygonWithHoles. Returns index triples into the
/// concatenation of all loops. Collinear boundary points are kept as shared
/// vertices so that neighbouring faces stay conforming.
std::vector<std::array<int, 3>> triangulate(const std::vector<std::vector<Vec2>>& loops);

/// Triangulates a face polygon; returns 3D triangles oriented with the plane normal.
std::vector<std::array<Point3, 3>> triangulateFace(const PolygonWithHoles& poly);

/// Clips a convex polygon to the half-space plane.signedDistance(p) <= 0.
std::vector<Point3> clipConvex(const std::vector<Point3>& poly, const Plane& keepBelow, double tol = kEpsGeom);

}  // namespace ppdm

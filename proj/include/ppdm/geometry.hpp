#pragma once

#include <vector>

#include "ppdm/brep.hpp"

namespace ppdm {

enum class MotionKind { kTranslation, kRotation, kScrew };

/// T(t)(p) = R(t·angle, axis)(p − axis_point) + axis_point + t·translation.
/// Rotation is applied first, then translation.
struct Motion {
  MotionKind kind = MotionKind::kTranslation;
  Vec3 translation;
  Point3 axis_point;
  Vec3 axis{0, 0, 1};
  double angle = 0.0;

  static Motion translate(const Vec3& v);
  static Motion rotate(const Point3& a, const Vec3& u, double angle);
  static Motion screw(const Vec3& v, const Point3& a, const Vec3& u, double angle);

  bool rotates() const { return kind != MotionKind::kTranslation && angle != 0.0; }
  bool translates() const { return kind != MotionKind::kRotation && norm(translation) > 0.0; }

  /// Motion over [0, s] reparameterised to [0, 1].
  Motion restricted(double s) const;
  /// T(s + (1−s)τ) ∘ T(s)⁻¹, the part of the motion still to go after s.
  Motion remaining(double s) const;
  /// τ ↦ T(1−τ) ∘ T(1)⁻¹: walks the end pose back to the start.
  Motion inverse() const;
};

/// p ↦ R·p + shift
struct Rigid {
  Mat3 R;
  Vec3 shift;
  Point3 apply(const Point3& p) const { return R * p + shift; }
  Vec3 applyDirection(const Vec3& d) const { return R * d; }
  Plane apply(const Plane& pl) const;
  Rigid inverse() const;
  /// this ∘ other
  Rigid compose(const Rigid& other) const;
};

Rigid transformAt(const Motion& m, double t);

/// Body moved rigidly; topology and tags are unchanged.
Body transformed(const Body& body, const Rigid& r);
Body translated(const Body& body, const Vec3& v);

Point3 evaluate_motion(const Motion& m, double t, const Point3& p);
Plane evaluate_motion(const Motion& m, double t, const Plane& pl);

struct MovingPlane {
  Plane base;
  Motion motion;
  Plane at(double t) const { return evaluate_motion(motion, t, base); }
};

struct Line {
  Point3 point;
  Vec3 direction;  // unit
};

enum class PlanePairKind { kLine, kParallel, kCoincident };
struct PlanePair {
  PlanePairKind kind = PlanePairKind::kParallel;
  Line line;
};
PlanePair plane_plane_intersect(const Plane& p1, const Plane& p2);

struct ModelingSpaceBox {
  Point3 lo, hi;
  bool contains(const Point3& p, double tol = 0.0) const;
};

/// Cube centred on the body's bounding box with side scale × its diagonal.
ModelingSpaceBox modelingSpace(const Body& body, double scale);

enum class ConstraintKind { kPointCrossing, kLineContainment, kParallelism, kBoxExit };

struct EventConstraint {
  ConstraintKind kind = ConstraintKind::kPointCrossing;
  Point3 point;           // point_crossing
  Line line;              // line_containment
  Plane other;            // parallelism
  Plane fixed[2];         // box_exit: the vertex is plane(t) ∩ fixed[0] ∩ fixed[1]
  ModelingSpaceBox box;   // box_exit

  static EventConstraint pointCrossing(const Point3& p);
  static EventConstraint lineContainment(const Line& l);
  static EventConstraint parallelism(const Plane& other);
  static EventConstraint boxExit(const Plane& f0, const Plane& f1, const ModelingSpaceBox& box);
};

inline constexpr int kBoxExitSamples = 256;

/// Parameters in [t_lo, t_hi] where the constraint holds, sorted and merged
/// within kEpsT. Throws kDegenerateConstraint when it holds on the whole window.
std::vector<double> event_roots(const MovingPlane& moving, const EventConstraint& c, double t_lo, double t_hi);

/// Vertex of a box_exit constraint at t; false when the three planes are singular.
bool boxExitVertex(const MovingPlane& moving, const EventConstraint& c, double t, Point3& out);

}  // namespace ppdm

#include "ppdm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ppdm/error.hpp"

namespace ppdm {

Motion Motion::translate(const Vec3& v) {
  Motion m;
  m.kind = MotionKind::kTranslation;
  m.translation = v;
  return m;
}

Motion Motion::rotate(const Point3& a, const Vec3& u, double angle) {
  if (norm(u) < 1e-12) throw Error(ErrorCode::kInvalidArgument, "rotation axis has zero length");
  Motion m;
  m.kind = MotionKind::kRotation;
  m.axis_point = a;
  m.axis = normalized(u);
  m.angle = angle;
  return m;
}

Motion Motion::screw(const Vec3& v, const Point3& a, const Vec3& u, double angle) {
  Motion m = rotate(a, u, angle);
  m.kind = MotionKind::kScrew;
  m.translation = v;
  return m;
}

Motion Motion::restricted(double s) const {
  Motion m = *this;
  m.translation = translation * s;
  m.angle = angle * s;
  return m;
}

Motion Motion::remaining(double s) const {
  Motion m = *this;
  m.axis_point = axis_point + translation * s;
  m.translation = translation * (1.0 - s);
  m.angle = angle * (1.0 - s);
  return m;
}

Motion Motion::inverse() const {
  Motion m = *this;
  m.axis_point = axis_point + translation;
  m.translation = -translation;
  m.angle = -angle;
  return m;
}

Plane Rigid::apply(const Plane& pl) const {
  Vec3 n = normalized(R * pl.normal);
  return {n, dot(n, apply(pl.anyPoint()))};
}

Rigid Rigid::inverse() const {
  Rigid r;
  r.R = R.transposed();
  r.shift = -(r.R * shift);
  return r;
}

Rigid Rigid::compose(const Rigid& other) const {
  Rigid r;
  r.R = R * other.R;
  r.shift = R * other.shift + shift;
  return r;
}

Rigid transformAt(const Motion& m, double t) {
  Rigid r;
  if (m.kind != MotionKind::kTranslation) r.R = Mat3::rotation(m.axis, t * m.angle);
  Vec3 v = m.kind == MotionKind::kRotation ? Vec3{} : m.translation;
  r.shift = m.axis_point - r.R * m.axis_point + v * t;
  return r;
}

Body transformed(const Body& body, const Rigid& r) {
  Body out = body;
  for (auto& v : out.vertices) v.point = r.apply(v.point);
  for (auto& p : out.planes) p = r.apply(p);
  return out;
}

Body translated(const Body& body, const Vec3& v) {
  Rigid r;
  r.shift = v;
  return transformed(body, r);
}

Point3 evaluate_motion(const Motion& m, double t, const Point3& p) { return transformAt(m, t).apply(p); }
Plane evaluate_motion(const Motion& m, double t, const Plane& pl) { return transformAt(m, t).apply(pl); }

PlanePair plane_plane_intersect(const Plane& p1, const Plane& p2) {
  Vec3 d = cross(p1.normal, p2.normal);
  double s = norm(d);
  PlanePair out;
  if (s <= kEpsGeom) {
    double gap = dot(p1.normal, p2.normal) > 0 ? p1.offset - p2.offset : p1.offset + p2.offset;
    out.kind = std::abs(gap) <= kEpsGeom ? PlanePairKind::kCoincident : PlanePairKind::kParallel;
    return out;
  }
  out.kind = PlanePairKind::kLine;
  out.line.direction = d / s;
  Vec3 p;
  solve3(p1.normal, p2.normal, out.line.direction, {p1.offset, p2.offset, 0.0}, p, 0.0);
  out.line.point = p;
  return out;
}

bool ModelingSpaceBox::contains(const Point3& p, double tol) const {
  for (int i = 0; i < 3; ++i)
    if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
  return true;
}

ModelingSpaceBox modelingSpace(const Body& body, double scale) {
  Point3 lo, hi;
  if (!body.bounds(lo, hi)) return {{-scale / 2, -scale / 2, -scale / 2}, {scale / 2, scale / 2, scale / 2}};
  Point3 c = (lo + hi) * 0.5;
  double half = 0.5 * scale * std::max(norm(hi - lo), 1e-9);
  return {c - Vec3{half, half, half}, c + Vec3{half, half, half}};
}

EventConstraint EventConstraint::pointCrossing(const Point3& p) {
  EventConstraint c;
  c.kind = ConstraintKind::kPointCrossing;
  c.point = p;
  return c;
}
EventConstraint EventConstraint::lineContainment(const Line& l) {
  EventConstraint c;
  c.kind = ConstraintKind::kLineContainment;
  c.line = l;
  return c;
}
EventConstraint EventConstraint::parallelism(const Plane& other) {
  EventConstraint c;
  c.kind = ConstraintKind::kParallelism;
  c.other = other;
  return c;
}
EventConstraint EventConstraint::boxExit(const Plane& f0, const Plane& f1, const ModelingSpaceBox& box) {
  EventConstraint c;
  c.kind = ConstraintKind::kBoxExit;
  c.fixed[0] = f0;
  c.fixed[1] = f1;
  c.box = box;
  return c;
}

namespace {

struct Degenerate {};

std::vector<double> dedupe(std::vector<double> roots) {
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots)
    if (out.empty() || r - out.back() > kEpsT) out.push_back(r);
  return out;
}

std::vector<double> clampWindow(const std::vector<double>& roots, double lo, double hi) {
  std::vector<double> out;
  for (double r : roots) {
    if (r < lo - kEpsT || r > hi + kEpsT) continue;
    out.push_back(std::clamp(r, lo, hi));
  }
  return dedupe(out);
}

// Roots of a + b·t on [lo, hi].
std::vector<double> linearRoots(double a, double b, double lo, double hi, double tol) {
  double span = std::max(std::abs(lo), std::abs(hi));
  if (std::abs(b) * std::max(span, 1.0) <= tol) {
    if (std::abs(a) <= tol) throw Degenerate{};
    return {};
  }
  return clampWindow({-a / b}, lo, hi);
}

// Roots of A cos(tθ) + B sin(tθ) + C = 0 on [lo, hi].
std::vector<double> trigRoots(double A, double B, double C, double theta, double lo, double hi, double tol) {
  double R = std::hypot(A, B);
  if (R <= tol) {
    if (std::abs(C) <= tol) throw Degenerate{};
    return {};
  }
  double q = -C / R;
  if (std::abs(q) > 1.0 + tol / R) return {};
  q = std::clamp(q, -1.0, 1.0);
  double alpha = std::atan2(B, A), beta = std::acos(q);
  double plo = std::min(lo * theta, hi * theta), phi = std::max(lo * theta, hi * theta);
  std::vector<double> roots;
  for (double base : {alpha + beta, alpha - beta}) {
    double k0 = std::floor((plo - base) / (2 * M_PI)) - 1;
    for (double k = k0; base + 2 * M_PI * k <= phi + 1e-12; k += 1) {
      double p = base + 2 * M_PI * k;
      if (p >= plo - 1e-12) roots.push_back(p / theta);
    }
  }
  return clampWindow(roots, lo, hi);
}

// n(φ)·w with n(φ) = R(φ, u)·n0, as A cos φ + B sin φ + C.
void harmonic(const Vec3& n0, const Vec3& u, const Vec3& w, double& A, double& B, double& C) {
  C = dot(u, n0) * dot(u, w);
  A = dot(n0, w) - C;
  B = dot(cross(u, n0), w);
}

std::vector<double> sampledRoots(const std::function<double(double)>& f, double lo, double hi, int samples,
                                 double tol) {
  std::vector<double> roots;
  double prevT = lo, prevF = f(lo);
  bool allZero = std::abs(prevF) <= tol;
  if (std::abs(prevF) <= tol) roots.push_back(lo);
  for (int i = 1; i <= samples; ++i) {
    double t = lo + (hi - lo) * i / samples;
    double ft = f(t);
    if (std::abs(ft) <= tol) {
      roots.push_back(t);
    } else {
      allZero = false;
      if (std::abs(prevF) > tol && (prevF > 0) != (ft > 0)) {
        double a = prevT, b = t, fa = prevF;
        while (b - a > kEpsT * 0.1) {
          double m = 0.5 * (a + b), fm = f(m);
          if ((fm > 0) == (fa > 0)) a = m, fa = fm;
          else b = m;
        }
        roots.push_back(0.5 * (a + b));
      }
    }
    prevT = t;
    prevF = ft;
  }
  if (allZero) throw Degenerate{};
  return dedupe(roots);
}

std::vector<double> pointCrossingRoots(const MovingPlane& mp, const Point3& p, double lo, double hi) {
  const Motion& m = mp.motion;
  const Vec3& n0 = mp.base.normal;
  double tol = kEpsGeom * (1.0 + norm(p));
  if (!m.rotates()) {
    Vec3 v = m.kind == MotionKind::kRotation ? Vec3{} : m.translation;
    return linearRoots(dot(n0, p) - mp.base.offset, -dot(n0, v), lo, hi, tol);
  }
  double c0 = mp.base.offset - dot(n0, m.axis_point);
  if (!m.translates()) {
    double A, B, C;
    harmonic(n0, m.axis, p - m.axis_point, A, B, C);
    return trigRoots(A, B, C - c0, m.angle, lo, hi, tol);
  }
  auto f = [&](double t) { return mp.at(t).signedDistance(p); };
  return sampledRoots(f, lo, hi, 4096, tol);
}

}  // namespace

bool boxExitVertex(const MovingPlane& moving, const EventConstraint& c, double t, Point3& out) {
  Plane pl = moving.at(t);
  return solve3(pl.normal, c.fixed[0].normal, c.fixed[1].normal, {pl.offset, c.fixed[0].offset, c.fixed[1].offset},
                out);
}

std::vector<double> event_roots(const MovingPlane& moving, const EventConstraint& c, double t_lo, double t_hi) {
  if (!(t_lo <= t_hi)) throw Error(ErrorCode::kInvalidArgument, "empty root window");
  try {
    switch (c.kind) {
      case ConstraintKind::kPointCrossing:
        return pointCrossingRoots(moving, c.point, t_lo, t_hi);
      case ConstraintKind::kLineContainment: {
        Point3 p0 = c.line.point, p1 = c.line.point + c.line.direction;
        std::vector<double> r0;
        bool d0 = false;
        try {
          r0 = pointCrossingRoots(moving, p0, t_lo, t_hi);
        } catch (const Degenerate&) {
          d0 = true;
        }
        if (d0) return pointCrossingRoots(moving, p1, t_lo, t_hi);
        std::vector<double> out;
        double tol = kEpsGeom * (1.0 + norm(p1));
        for (double t : r0)
          if (std::abs(moving.at(t).signedDistance(p1)) <= tol) out.push_back(t);
        return out;
      }
      case ConstraintKind::kParallelism: {
        const Motion& m = moving.motion;
        const Vec3& n0 = moving.base.normal;
        Vec3 w = normalized(c.other.normal);
        if (!m.rotates()) {
          if (norm(cross(n0, w)) <= 1e-7) throw Degenerate{};
          return {};
        }
        double A, B, C;
        harmonic(n0, m.axis, w, A, B, C);
        std::vector<double> roots;
        for (double s : {1.0, -1.0}) {
          auto r = trigRoots(A, B, C - s, m.angle, t_lo, t_hi, 1e-13);
          roots.insert(roots.end(), r.begin(), r.end());
        }
        return dedupe(roots);
      }
      case ConstraintKind::kBoxExit: {
        auto inside = [&](double t) {
          Point3 p;
          return boxExitVertex(moving, c, t, p) && c.box.contains(p);
        };
        std::vector<double> roots;
        double prevT = t_lo;
        bool prev = inside(t_lo);
        for (int i = 1; i <= kBoxExitSamples; ++i) {
          double t = t_lo + (t_hi - t_lo) * i / kBoxExitSamples;
          bool cur = inside(t);
          if (cur != prev) {
            double a = prevT, b = t;
            while (b - a > kEpsT * 0.1) {
              double mid = 0.5 * (a + b);
              if (inside(mid) == prev) a = mid;
              else b = mid;
            }
            roots.push_back(0.5 * (a + b));
          }
          prevT = t;
          prev = cur;
        }
        return dedupe(roots);
      }
    }
  } catch (const Degenerate&) {
    throw Error(ErrorCode::kDegenerateConstraint, "constraint holds over the whole window");
  }
  return {};
}

}  // namespace ppdm

#include "ppdm/boolean.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ppdm/builder.hpp"
#include "ppdm/error.hpp"
#include "ppdm/mass.hpp"
#include "ppdm/polygon.hpp"
#include "ppdm/validate.hpp"

namespace ppdm {

namespace {

struct Box {
  Point3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  void add(const Point3& p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  bool overlaps(const Box& o, double tol) const {
    for (int i = 0; i < 3; ++i)
      if (hi[i] < o.lo[i] - tol || o.hi[i] < lo[i] - tol) return false;
    return true;
  }
};

Box boxOf(const std::vector<Point3>& pts) {
  Box b;
  for (const auto& p : pts) b.add(p);
  return b;
}

struct FaceData {
  PolygonWithHoles poly;
  Box box;
  std::string tag;
  std::vector<Plane> edgePlanes;  // inward-facing cuts along each boundary edge
};

std::vector<FaceData> faceData(const Body& body) {
  std::vector<FaceData> out;
  for (int f = 0; f < static_cast<int>(body.faces.size()); ++f) {
    FaceData fd;
    fd.poly = facePolygon(body, f);
    fd.tag = body.faces[f].tag;
    for (const auto& l : fd.poly.loops) {
      for (size_t i = 0; i < l.size(); ++i) {
        fd.box.add(l[i]);
        const Point3& p = l[i];
        const Point3& q = l[(i + 1) % l.size()];
        Vec3 n = cross(fd.poly.plane.normal, q - p);
        if (norm(n) > 0) fd.edgePlanes.push_back(Plane::through(p, normalized(n)));
      }
    }
    out.push_back(std::move(fd));
  }
  return out;
}

struct Piece {
  std::vector<Point3> pts;
  Box box;
};

void splitAll(std::vector<Piece>& pieces, const Plane& pl, const Box& region, double tol) {
  std::vector<Piece> out;
  out.reserve(pieces.size());
  for (auto& pc : pieces) {
    if (!pc.box.overlaps(region, tol)) {
      out.push_back(std::move(pc));
      continue;
    }
    bool above = false, below = false;
    for (const auto& p : pc.pts) {
      double d = pl.signedDistance(p);
      if (d > tol) above = true;
      if (d < -tol) below = true;
    }
    if (!(above && below)) {
      out.push_back(std::move(pc));
      continue;
    }
    for (const Plane& side : {pl, pl.flipped()}) {
      auto part = clipConvex(pc.pts, side, tol);
      if (part.size() >= 3) out.push_back({part, boxOf(part)});
    }
  }
  pieces = std::move(out);
}

enum class Where { kIn, kOut, kOnSame, kOnOpposite };

struct Classifier {
  const std::vector<FaceData>& faces;
  std::vector<std::array<Point3, 3>> tris;
  double tol;

  Classifier(const std::vector<FaceData>& fs, double t) : faces(fs), tol(t) {
    for (const auto& f : fs)
      for (const auto& tr : triangulateFace(f.poly)) tris.push_back(tr);
  }

  static double solidAngle(const Vec3& a, const Vec3& b, const Vec3& c) {
    double la = norm(a), lb = norm(b), lc = norm(c);
    double num = dot(a, cross(b, c));
    double den = la * lb * lc + dot(a, b) * lc + dot(a, c) * lb + dot(b, c) * la;
    return 2.0 * std::atan2(num, den);
  }

  Where classify(const Point3& c, const Plane& pl) const {
    for (const auto& f : faces) {
      if (!coplanar(pl, f.poly.plane, 1e-7, tol)) continue;
      if (!f.box.overlaps(Box{c, c}, tol)) continue;
      if (locateOnFace(f.poly, c, tol) != PointLocation::kOutside)
        return dot(pl.normal, f.poly.plane.normal) > 0 ? Where::kOnSame : Where::kOnOpposite;
    }
    double w = 0.0;
    for (const auto& t : tris) w += solidAngle(t[0] - c, t[1] - c, t[2] - c);
    return w / (4.0 * M_PI) > 0.5 ? Where::kIn : Where::kOut;
  }
};

struct Kept {
  std::vector<Point3> pts;
  Plane plane;
  std::string tag;
};

// Fragments of every face of `src`, cut so that each is uniformly placed
// relative to `other`, paired with their classification.
std::vector<std::pair<Kept, Where>> fragments(const std::vector<FaceData>& src, const std::vector<FaceData>& other,
                                              const Classifier& cls, double tol) {
  std::vector<std::pair<Kept, Where>> out;
  for (const auto& f : src) {
    std::vector<Piece> pieces;
    for (const auto& tr : triangulateFace(f.poly)) {
      std::vector<Point3> pts{tr[0], tr[1], tr[2]};
      pieces.push_back({pts, boxOf(pts)});
    }
    for (const auto& g : other) {
      if (!g.box.overlaps(f.box, tol)) continue;
      if (coplanar(f.poly.plane, g.poly.plane, 1e-7, tol)) {
        for (const auto& ep : g.edgePlanes) splitAll(pieces, ep, g.box, tol);
      } else {
        splitAll(pieces, g.poly.plane, g.box, tol);
      }
    }
    for (auto& pc : pieces) {
      Vec3 va = vectorArea(pc.pts);
      if (norm(va) <= tol * tol) continue;
      Point3 c;
      for (const auto& p : pc.pts) c = c + p;
      c = c / static_cast<double>(pc.pts.size());
      out.push_back({{std::move(pc.pts), f.poly.plane, f.tag}, cls.classify(c, f.poly.plane)});
    }
  }
  return out;
}

double scaleOf(const Body& a, const Body& b) {
  double s = 1.0;
  for (const Body* body : {&a, &b})
    for (const auto& v : body->vertices) s = std::max({s, std::abs(v.point.x), std::abs(v.point.y), std::abs(v.point.z)});
  return s;
}

}  // namespace

Body bool_op(const Body& a, const Body& b, BoolKind kind) {
  for (const Body* body : {&a, &b}) {
    auto rep = validate(*body);
    if (!rep.valid)
      throw Error(ErrorCode::kInvalidBody, "Boolean operand is invalid: " + rep.violations.front().message);
  }
  if (a.empty() || b.empty()) {
    switch (kind) {
      case BoolKind::kUnion: return a.empty() ? b : a;
      case BoolKind::kDifference: return a;
      case BoolKind::kIntersection: return Body{};
    }
  }
  const double tol = kEpsGeom * scaleOf(a, b);
  auto fa = faceData(a), fb = faceData(b);
  Classifier ca(fa, tol), cb(fb, tol);
  auto pa = fragments(fa, fb, cb, tol);
  auto pb = fragments(fb, fa, ca, tol);

  std::vector<SoupPolygon> soup;
  auto keep = [&](const Kept& k, bool flip) {
    SoupPolygon s{k.pts, k.plane, k.tag};
    if (flip) {
      std::reverse(s.points.begin(), s.points.end());
      s.plane = s.plane.flipped();
    }
    soup.push_back(std::move(s));
  };
  for (const auto& [k, w] : pa) {
    switch (kind) {
      case BoolKind::kUnion:
        if (w == Where::kOut || w == Where::kOnSame) keep(k, false);
        break;
      case BoolKind::kIntersection:
        if (w == Where::kIn || w == Where::kOnSame) keep(k, false);
        break;
      case BoolKind::kDifference:
        if (w == Where::kOut || w == Where::kOnOpposite) keep(k, false);
        break;
    }
  }
  for (const auto& [k, w] : pb) {
    switch (kind) {
      case BoolKind::kUnion:
        if (w == Where::kOut) keep(k, false);
        break;
      case BoolKind::kIntersection:
        if (w == Where::kIn) keep(k, false);
        break;
      case BoolKind::kDifference:
        if (w == Where::kIn) keep(k, true);
        break;
    }
  }
  if (soup.empty()) return Body{};
  Body out;
  try {
    out = canonicalize(buildBody(soup));
  } catch (const Error& e) {
    throw Error(ErrorCode::kRobustnessFailure, std::string("Boolean result could not be stitched: ") + e.what());
  }
  auto rep = validate(out);
  if (!rep.valid)
    throw Error(ErrorCode::kRobustnessFailure, "Boolean result is not a valid solid: " + rep.violations.front().message);
  return out;
}

const char* classification_name(Classification c) {
  switch (c) {
    case Classification::kInside: return "inside";
    case Classification::kOutside: return "outside";
    case Classification::kOnBoundary: return "on_boundary";
  }
  return "?";
}

namespace {

struct RayFace {
  Plane plane;
  PlaneFrame frame;
  std::vector<std::vector<Vec2>> loops;
  Box box;
};

class PointClassifier {
 public:
  explicit PointClassifier(const Body& body) : body_(body) {
    for (int f = 0; f < static_cast<int>(body.faces.size()); ++f) {
      auto poly = facePolygon(body, f);
      RayFace rf{poly.plane, PlaneFrame(poly.plane), {}, {}};
      for (const auto& l : poly.loops) {
        std::vector<Vec2> q;
        for (const auto& pt : l) {
          q.push_back(rf.frame.to2d(pt));
          rf.box.add(pt);
        }
        rf.loops.push_back(std::move(q));
      }
      faces_.push_back(std::move(rf));
    }
  }

  Classification classify(const Point3& p) const {
    if (faces_.empty()) return Classification::kOutside;
    const double tol = kEpsGeom * (1.0 + norm(p));
    const Box pb{p, p};
    for (const auto& f : faces_)
      if (f.box.overlaps(pb, tol) && std::abs(f.plane.signedDistance(p)) <= tol &&
          locatePoint2d(f.loops, f.frame.to2d(p), tol) != PointLocation::kOutside)
        return Classification::kOnBoundary;

    static const Vec3 dirs[] = {normalized(Vec3{0.5773, 0.3101, 0.7547}), normalized(Vec3{-0.2113, 0.8627, 0.4597}),
                                normalized(Vec3{0.7071, -0.4142, 0.5774}), normalized(Vec3{-0.3333, -0.6180, -0.7118}),
                                normalized(Vec3{0.1234, 0.9876, -0.0987}), normalized(Vec3{-0.8660, 0.2588, 0.4281})};
    for (const Vec3& d : dirs) {
      int crossings = 0;
      bool degenerate = false;
      for (const auto& f : faces_) {
        double nd = dot(f.plane.normal, d);
        double dist = f.plane.signedDistance(p);
        if (std::abs(nd) < 1e-9) {
          if (std::abs(dist) <= tol) degenerate = true;
          continue;
        }
        double t = -dist / nd;
        if (t <= tol) continue;
        Point3 hit = p + d * t;
        if (!f.box.overlaps(Box{hit, hit}, tol)) continue;
        auto loc = locatePoint2d(f.loops, f.frame.to2d(hit), tol);
        if (loc == PointLocation::kBoundary) {
          degenerate = true;
          break;
        }
        if (loc == PointLocation::kInside) ++crossings;
      }
      if (!degenerate) return crossings % 2 ? Classification::kInside : Classification::kOutside;
    }
    return windingNumber(body_, p) > 0.5 ? Classification::kInside : Classification::kOutside;
  }

 private:
  const Body& body_;
  std::vector<RayFace> faces_;
};

}  // namespace

Classification classify_point(const Body& body, const Point3& p) { return PointClassifier(body).classify(p); }

McEstimate mc_volume(const Body& body, long samples, std::uint64_t seed) {
  Point3 lo, hi;
  if (body.empty() || !body.bounds(lo, hi)) return {0.0, 0.0};
  PointClassifier pc(body);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y), uz(lo.z, hi.z);
  long hits = 0;
  for (long i = 0; i < samples; ++i) {
    Point3 q{ux(rng), uy(rng), uz(rng)};
    if (pc.classify(q) == Classification::kInside) ++hits;
  }
  double vbox = (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z);
  double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {vbox * p, vbox * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

double symdiff_volume(const Body& a, const Body& b) {
  return volume(bool_op(a, b, BoolKind::kDifference)) + volume(bool_op(b, a, BoolKind::kDifference));
}

double volume_gap(const Body& a, const Body& b) { return std::abs(volume(a) - volume(b)); }

}  // namespace ppdm

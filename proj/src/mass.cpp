#include "ppdm/mass.hpp"

#include <cmath>
#include <numeric>

#include "ppdm/error.hpp"
#include "ppdm/polygon.hpp"
#include "ppdm/validate.hpp"

namespace ppdm {

double faceArea(const Body& body, int face) {
  const Face& f = body.faces[face];
  Vec3 n = body.facePlane(face).normal;
  double a = 0.0;
  for (const Loop& l : f.loops) a += dot(vectorArea(body.loopPoints(l)), n);
  return a;
}

std::map<int, double> face_areas(const Body& body) {
  if (!validate(body).valid) throw Error(ErrorCode::kInvalidBody, "face_areas of an invalid body");
  std::map<int, double> out;
  for (int f = 0; f < static_cast<int>(body.faces.size()); ++f) out[f] = faceArea(body, f);
  return out;
}

double faceSetVolume(const Body& body, const std::vector<int>& faces) {
  double v = 0.0;
  for (int f : faces) {
    // offset·area is origin dependent per face but the closed sum is not.
    const Face& face = body.faces[f];
    for (const Loop& l : face.loops) {
      auto pts = body.loopPoints(l);
      if (pts.size() < 3) continue;
      Vec3 va = vectorArea(pts);
      v += dot(pts[0], va);
    }
  }
  return v / 3.0;
}

double volumeUnchecked(const Body& body) {
  std::vector<int> all(body.faces.size());
  std::iota(all.begin(), all.end(), 0);
  return faceSetVolume(body, all);
}

double volume(const Body& body) {
  auto report = validate(body);
  if (!report.valid)
    throw Error(ErrorCode::kInvalidBody, "volume of an invalid body: " + report.violations.front().message);
  return volumeUnchecked(body);
}

namespace {
double solidAngle(const Vec3& a, const Vec3& b, const Vec3& c) {
  double la = norm(a), lb = norm(b), lc = norm(c);
  double num = dot(a, cross(b, c));
  double den = la * lb * lc + dot(a, b) * lc + dot(a, c) * lb + dot(b, c) * la;
  return 2.0 * std::atan2(num, den);
}
}  // namespace

double windingNumber(const Body& body, const std::vector<int>& faces, const Point3& p) {
  double total = 0.0;
  for (int f : faces)
    for (const auto& tri : triangulateFace(facePolygon(body, f)))
      total += solidAngle(tri[0] - p, tri[1] - p, tri[2] - p);
  return total / (4.0 * M_PI);
}

double windingNumber(const Body& body, const Point3& p) {
  std::vector<int> all(body.faces.size());
  std::iota(all.begin(), all.end(), 0);
  return windingNumber(body, all, p);
}

}  // namespace ppdm

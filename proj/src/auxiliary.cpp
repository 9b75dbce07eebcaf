#include <algorithm>
#include <cmath>
#include <map>

#include "ppdm/boolean.hpp"
#include "ppdm/builder.hpp"
#include "ppdm/error.hpp"
#include "ppdm/fixtures.hpp"
#include "ppdm/mass.hpp"
#include "ppdm/polygon.hpp"
#include "ppdm/pushpull.hpp"

namespace ppdm {

const char* aux_sign_name(AuxSign s) { return s == AuxSign::kAdditive ? "additive" : "subtractive"; }

namespace {

double scaleOf(const Body& b) {
  double s = 1.0;
  for (const auto& v : b.vertices) s = std::max({s, std::abs(v.point.x), std::abs(v.point.y), std::abs(v.point.z)});
  return s;
}

std::vector<Point3> dropRepeats(const std::vector<Point3>& pts, double tol) {
  std::vector<Point3> out;
  for (const auto& p : pts)
    if (out.empty() || distance(out.back(), p) > tol) out.push_back(p);
  while (out.size() > 1 && distance(out.front(), out.back()) <= tol) out.pop_back();
  return out;
}

struct PartSoup {
  std::vector<SoupPolygon> polys;
};

void addPoly(PartSoup& part, std::vector<Point3> pts, const Plane& plane, const std::string& tag, double tol) {
  pts = dropRepeats(pts, tol);
  if (pts.size() < 3) return;
  if (std::abs(dot(vectorArea(pts), plane.normal)) <= tol * tol) return;
  part.polys.push_back({std::move(pts), plane, tag});
}

void addClippedCap(PartSoup& part, const PolygonWithHoles& face, const Plane& keepBelow, const Plane& outward,
                   const std::string& tag, double tol) {
  for (const auto& tri : triangulateFace(face)) {
    auto piece = clipConvex({tri[0], tri[1], tri[2]}, keepBelow, tol);
    if (piece.size() >= 3) addPoly(part, piece, outward, tag, tol);
  }
}

Body boxBody(const ModelingSpaceBox& box) {
  Vec3 d = box.hi - box.lo;
  return translated(make_fixture("box", {{"w", d.x}, {"d", d.y}, {"h", d.z}}), box.lo);
}

}  // namespace

std::vector<AuxiliaryVolume> build_auxiliary(const Body& body, const PushPullContext& context, const Motion& motion,
                                             double t_a, double t_b, const ModelingSpaceBox* box) {
  if (t_b - t_a <= kEpsT) return {};
  const double tol = kEpsGeom * scaleOf(body);
  const std::set<std::string> tags(context.pp_tags.begin(), context.pp_tags.end());
  const Rigid rel = relativeTransform(motion, t_a, t_b);
  Body regen;
  std::vector<int> failed;
  if (!regenerateGeometry(body, tags, rel, regen, &failed))
    throw Error(ErrorCode::kInternalInvariant, "moving face cannot be regenerated at the interval end");
  const auto users = edgeFaces(body);

  std::vector<std::pair<PartSoup, PartSoup>> perFace;
  for (int f : context.pp_faces) {
    perFace.emplace_back();
    PartSoup& sub = perFace.back().first;
    PartSoup& add = perFace.back().second;
    const Plane Sa = body.facePlane(f);
    const Plane Sb = regen.facePlane(f);
    if (samePlane(Sa, Sb, 1e-12, tol)) continue;
    const std::string& tag = body.faces[f].tag;
    PolygonWithHoles Fa = facePolygon(body, f), Fb = facePolygon(regen, f);

    addClippedCap(sub, Fa, Sb.flipped(), Sa, tag, tol);
    addClippedCap(add, Fa, Sb, Sa.flipped(), tag, tol);
    addClippedCap(sub, Fb, Sa, Sb.flipped(), tag, tol);
    addClippedCap(add, Fb, Sa.flipped(), Sb, tag, tol);

    for (const Loop& loop : body.faces[f].loops) {
      for (const LoopUse& use : loop.uses) {
        int u = body.useStart(use), v = body.useEnd(use);
        Point3 ua = body.vertices[u].point, va = body.vertices[v].point;
        Point3 ub = regen.vertices[u].point, vb = regen.vertices[v].point;
        int g = -1;
        for (int h : users[use.edge])
          if (h != f) g = h;
        if (g < 0) throw Error(ErrorCode::kInternalInvariant, "pp face edge has no neighbor");

        Plane wall;
        if (context.pp_faces.count(g)) {
          Vec3 n1 = cross(va - ua, ub - ua), n2 = cross(va - ua, vb - ua);
          Vec3 n = norm(n1) > norm(n2) ? n1 : n2;
          if (norm(n) <= tol * tol) continue;  // the shared edge slides along itself
          wall = Plane::through(ua, normalized(n));
          for (const Point3& q : {ub, vb})
            if (std::abs(wall.signedDistance(q)) > tol * 10)
              throw Error(ErrorCode::kUnsupported, "shared edge of merged faces sweeps a non-planar surface");
        } else {
          wall = body.facePlane(g);
        }
        Vec3 inward = cross(Sa.normal, va - ua);
        Point3 probe = (ua + va) * 0.5 + normalized(inward) * (1e-3 * std::max(distance(ua, va), 1e-6));
        if (wall.signedDistance(probe) > 0) wall = wall.flipped();
        const std::string& wallTag = body.faces[g].tag;

        double du = Sb.signedDistance(ua), dv = Sb.signedDistance(va);
        auto place = [&](const std::vector<Point3>& pts) {
          Point3 c;
          for (const auto& p : pts) c = c + p;
          c = c / static_cast<double>(pts.size());
          double s = Sa.signedDistance(c);
          if (s < -tol) addPoly(sub, pts, wall, wallTag, tol);
          else if (s > tol) addPoly(add, pts, wall, wallTag, tol);
        };
        if ((du > tol && dv < -tol) || (du < -tol && dv > tol)) {
          Point3 x = lerp(ua, va, du / (du - dv));
          place({ua, x, ub});
          place({x, va, vb});
        } else {
          place({ua, va, vb, ub});
        }
      }
    }
  }

  auto build = [&](const PartSoup& soup) {
    Body part;
    if (soup.polys.empty()) return part;
    try {
      part = canonicalize(buildBody(soup.polys));
    } catch (const Error& e) {
      throw Error(ErrorCode::kInternalInvariant, std::string("auxiliary shell does not close: ") + e.what());
    }
    auto rep = validate(part);
    if (!rep.valid)
      throw Error(ErrorCode::kInternalInvariant,
                  "auxiliary shell is not a valid solid: " + rep.violations.front().message);
    if (!part.empty() && volume(part) <= tol * tol) part = Body{};
    return part;
  };

  std::vector<AuxiliaryVolume> out;
  for (AuxSign sign : {AuxSign::kSubtractive, AuxSign::kAdditive}) {
    Body part;
    for (const auto& [sub, add] : perFace) {
      Body piece = build(sign == AuxSign::kSubtractive ? sub : add);
      if (piece.empty()) continue;
      part = part.empty() ? piece : bool_op(part, piece, BoolKind::kUnion);
    }
    if (part.empty()) continue;
    if (box) {
      Point3 lo, hi;
      part.bounds(lo, hi);
      if (!box->contains(lo) || !box->contains(hi)) part = bool_op(part, boxBody(*box), BoolKind::kIntersection);
      if (part.empty()) continue;
    }
    AuxiliaryVolume aux;
    aux.body = std::move(part);
    aux.sign = sign;
    aux.t_a = t_a;
    aux.t_b = t_b;
    aux.source_tags = context.pp_tags;
    out.push_back(std::move(aux));
  }
  return out;
}

namespace {

bool boxesOverlap(const Body& a, const Body& b) {
  Point3 la, ha, lb, hb;
  if (!a.bounds(la, ha) || !b.bounds(lb, hb)) return false;
  for (int i = 0; i < 3; ++i)
    if (ha[i] <= lb[i] + kEpsGeom || hb[i] <= la[i] + kEpsGeom) return false;
  return true;
}

std::string key(const AuxiliaryVolume& a) {
  std::string k;
  for (const auto& t : a.source_tags) k += t + "\x1f";
  return k;
}

}  // namespace

std::vector<AuxiliaryVolume> subdivide_overlaps(std::vector<AuxiliaryVolume> auxes) {
  bool changed = true;
  int guard = 0;
  while (changed) {
    changed = false;
    if (++guard > 1000) throw Error(ErrorCode::kInternalInvariant, "overlap subdivision does not terminate");
    for (size_t i = 0; i < auxes.size() && !changed; ++i) {
      for (size_t j = i + 1; j < auxes.size() && !changed; ++j) {
        if (!boxesOverlap(auxes[i].body, auxes[j].body)) continue;
        Body inter = bool_op(auxes[i].body, auxes[j].body, BoolKind::kIntersection);
        if (inter.empty() || volume(inter) <= 1e-12) continue;
        AuxiliaryVolume A = auxes[i], B = auxes[j];
        A.body = bool_op(A.body, inter, BoolKind::kDifference);
        B.body = bool_op(B.body, inter, BoolKind::kDifference);
        std::vector<AuxiliaryVolume> next;
        for (size_t k = 0; k < auxes.size(); ++k)
          if (k != i && k != j) next.push_back(std::move(auxes[k]));
        if (A.sign == B.sign) {
          AuxiliaryVolume I = A;
          I.body = std::move(inter);
          I.t_a = std::min(A.t_a, B.t_a);
          I.t_b = std::max(A.t_b, B.t_b);
          I.source_tags.insert(I.source_tags.end(), B.source_tags.begin(), B.source_tags.end());
          std::sort(I.source_tags.begin(), I.source_tags.end());
          I.source_tags.erase(std::unique(I.source_tags.begin(), I.source_tags.end()), I.source_tags.end());
          next.push_back(std::move(I));
        }
        if (!A.body.empty()) next.push_back(std::move(A));
        if (!B.body.empty()) next.push_back(std::move(B));
        auxes = std::move(next);
        changed = true;
      }
    }
  }
  std::vector<std::pair<std::tuple<std::string, int, double>, AuxiliaryVolume>> keyed;
  for (auto& a : auxes) {
    Point3 lo, hi;
    a.body.bounds(lo, hi);
    keyed.push_back({{key(a), a.sign == AuxSign::kSubtractive ? 0 : 1, lo.x + 1e3 * lo.y + 1e6 * lo.z}, std::move(a)});
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<AuxiliaryVolume> out;
  for (auto& [k, a] : keyed) out.push_back(std::move(a));
  return out;
}

Body apply_auxiliaries(const Body& body, const std::vector<AuxiliaryVolume>& auxes) {
  Body m = body;
  for (const auto& a : auxes)
    m = bool_op(m, a.body, a.sign == AuxSign::kSubtractive ? BoolKind::kDifference : BoolKind::kUnion);
  return m;
}

}  // namespace ppdm

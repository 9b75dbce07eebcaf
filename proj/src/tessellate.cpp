#include "ppdm/tessellate.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "ppdm/mass.hpp"
#include "ppdm/polygon.hpp"

namespace ppdm {

TriangleMesh tessellate(const Body& body) {
  TriangleMesh mesh;
  if (body.empty()) {
    mesh.warnings.push_back("body is empty");
    return mesh;
  }
  std::map<std::tuple<double, double, double>, int> index;
  auto vid = [&](const Point3& p) {
    auto key = std::make_tuple(p.x, p.y, p.z);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(mesh.positions.size());
    mesh.positions.push_back(p);
    index.emplace(key, id);
    return id;
  };
  for (int f = 0; f < static_cast<int>(body.faces.size()); ++f) {
    double area = std::abs(faceArea(body, f));
    if (area <= kEpsGeom * kEpsGeom) {
      mesh.warnings.push_back("face " + std::to_string(f) + " has zero area and was skipped");
      continue;
    }
    PolygonWithHoles poly = facePolygon(body, f);
    for (const auto& tri : triangulateFace(poly)) {
      mesh.triangles.push_back({vid(tri[0]), vid(tri[1]), vid(tri[2])});
      mesh.face_ids.push_back(f);
      mesh.face_tags.push_back(body.faces[f].tag);
      mesh.normals.push_back(poly.plane.normal);
    }
  }
  return mesh;
}

double meshVolume(const TriangleMesh& mesh) {
  double v = 0.0;
  for (const auto& t : mesh.triangles)
    v += dot(mesh.positions[t[0]], cross(mesh.positions[t[1]], mesh.positions[t[2]]));
  return v / 6.0;
}

std::string toObj(const TriangleMesh& mesh) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& p : mesh.positions) os << "v " << p.x << ' ' << p.y << ' ' << p.z << '\n';
  int current = -1;
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    if (mesh.face_ids[i] != current) {
      current = mesh.face_ids[i];
      os << "g face" << current << '_' << mesh.face_tags[i] << '\n';
    }
    const auto& t = mesh.triangles[i];
    os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  return os.str();
}

std::string toStl(const TriangleMesh& mesh, const std::string& name) {
  std::ostringstream os;
  os << std::setprecision(17) << "solid " << name << '\n';
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const Vec3& n = mesh.normals[i];
    os << "  facet normal " << n.x << ' ' << n.y << ' ' << n.z << "\n    outer loop\n";
    for (int k : mesh.triangles[i]) {
      const Point3& p = mesh.positions[k];
      os << "      vertex " << p.x << ' ' << p.y << ' ' << p.z << '\n';
    }
    os << "    endloop\n  endfacet\n";
  }
  os << "endsolid " << name << '\n';
  return os.str();
}

}  // namespace ppdm

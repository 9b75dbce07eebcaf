#include "ppdm/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ppdm/builder.hpp"
#include "ppdm/error.hpp"
#include "ppdm/mass.hpp"
#include "ppdm/validate.hpp"

namespace ppdm {

using nlohmann::json;

namespace {

json point(const Vec3& p) { return json::array({p.x, p.y, p.z}); }

[[noreturn]] void schemaError(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchema, "field '" + path + "': " + what);
}

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) schemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schemaError(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string sub(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }
std::string idx(const std::string& path, size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schemaError(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) schemaError(path, "not finite");
  return v;
}

int index(const json& j, const std::string& path, size_t limit) {
  if (!j.is_number_integer()) schemaError(path, "expected an integer id");
  long long v = j.get<long long>();
  if (v < 0 || static_cast<size_t>(v) >= limit) schemaError(path, "id " + std::to_string(v) + " out of range");
  return static_cast<int>(v);
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) schemaError(path, "expected a boolean");
  return j.get<bool>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) schemaError(path, "expected an array");
  return j;
}

Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) schemaError(path, "expected three numbers");
  return {number(j[0], idx(path, 0)), number(j[1], idx(path, 1)), number(j[2], idx(path, 2))};
}

}  // namespace

json document_json(const Body& input, const std::string& units) {
  Body body = canonicalize(input);
  json doc;
  doc["version"] = kDocumentVersion;
  doc["units"] = units;
  json vs = json::array();
  for (const auto& v : body.vertices) vs.push_back(point(v.point));
  doc["vertices"] = vs;
  json ps = json::array();
  for (const auto& p : body.planes) ps.push_back({{"normal", point(p.normal)}, {"offset", p.offset}});
  doc["planes"] = ps;
  json es = json::array();
  for (const auto& e : body.edges) es.push_back({e.v0, e.v1});
  doc["edges"] = es;
  json fs = json::array();
  for (const auto& f : body.faces) {
    json loops = json::array();
    for (const auto& l : f.loops) {
      json uses = json::array();
      for (const auto& u : l.uses) uses.push_back({{"edge", u.edge}, {"forward", u.forward}});
      loops.push_back(uses);
    }
    fs.push_back({{"plane", f.plane}, {"same_sense", f.same_sense}, {"loops", loops}, {"origin_tag", f.tag}});
  }
  doc["faces"] = fs;
  json ss = json::array();
  for (const auto& s : body.shells) ss.push_back({{"faces", s.faces}, {"outer", s.outer}});
  doc["shells"] = ss;
  json ls = json::array();
  for (const auto& l : body.lumps) ls.push_back({{"shells", l.shells}});
  doc["lumps"] = ls;
  return doc;
}

std::string save_document(const Body& body, const std::string& units) {
  return document_json(body, units).dump(2) + "\n";
}

Document document_from_json(const json& j) {
  if (!j.is_object()) schemaError("", "document must be an object");
  const json& ver = field(j, "version", "");
  if (!ver.is_number_integer()) schemaError("version", "expected an integer");
  if (ver.get<long long>() != kDocumentVersion)
    throw Error(ErrorCode::kVersionMismatch, "document version " + ver.dump() + " is not supported (expected 1)");
  Document doc;
  if (j.contains("units")) {
    if (!j["units"].is_string()) schemaError("units", "expected a string");
    doc.units = j["units"].get<std::string>();
  }
  Body& b = doc.body;
  const json& vs = array(field(j, "vertices", ""), "vertices");
  for (size_t i = 0; i < vs.size(); ++i) b.vertices.push_back({vec3(vs[i], idx("vertices", i))});
  const json& ps = array(field(j, "planes", ""), "planes");
  for (size_t i = 0; i < ps.size(); ++i) {
    std::string p = idx("planes", i);
    Plane pl;
    pl.normal = vec3(field(ps[i], "normal", p), sub(p, "normal"));
    pl.offset = number(field(ps[i], "offset", p), sub(p, "offset"));
    if (std::abs(norm(pl.normal) - 1.0) > 1e-9) schemaError(sub(p, "normal"), "not a unit vector");
    b.planes.push_back(pl);
  }
  const json& es = array(field(j, "edges", ""), "edges");
  for (size_t i = 0; i < es.size(); ++i) {
    std::string p = idx("edges", i);
    if (!es[i].is_array() || es[i].size() != 2) schemaError(p, "expected a vertex id pair");
    b.edges.push_back({index(es[i][0], idx(p, 0), b.vertices.size()), index(es[i][1], idx(p, 1), b.vertices.size())});
  }
  const json& fs = array(field(j, "faces", ""), "faces");
  for (size_t i = 0; i < fs.size(); ++i) {
    std::string p = idx("faces", i);
    Face f;
    f.plane = index(field(fs[i], "plane", p), sub(p, "plane"), b.planes.size());
    f.same_sense = boolean(field(fs[i], "same_sense", p), sub(p, "same_sense"));
    const json& tag = field(fs[i], "origin_tag", p);
    if (!tag.is_string()) schemaError(sub(p, "origin_tag"), "expected a string");
    f.tag = tag.get<std::string>();
    const json& loops = array(field(fs[i], "loops", p), sub(p, "loops"));
    if (loops.empty()) schemaError(sub(p, "loops"), "face has no loops");
    for (size_t k = 0; k < loops.size(); ++k) {
      std::string lp = idx(sub(p, "loops"), k);
      Loop loop;
      for (size_t u = 0; u < array(loops[k], lp).size(); ++u) {
        std::string up = idx(lp, u);
        LoopUse use;
        use.edge = index(field(loops[k][u], "edge", up), sub(up, "edge"), b.edges.size());
        use.forward = boolean(field(loops[k][u], "forward", up), sub(up, "forward"));
        loop.uses.push_back(use);
      }
      f.loops.push_back(std::move(loop));
    }
    b.faces.push_back(std::move(f));
  }
  const json& ss = array(field(j, "shells", ""), "shells");
  for (size_t i = 0; i < ss.size(); ++i) {
    std::string p = idx("shells", i);
    Shell s;
    const json& faces = array(field(ss[i], "faces", p), sub(p, "faces"));
    for (size_t k = 0; k < faces.size(); ++k) s.faces.push_back(index(faces[k], idx(sub(p, "faces"), k), b.faces.size()));
    s.outer = boolean(field(ss[i], "outer", p), sub(p, "outer"));
    b.shells.push_back(std::move(s));
  }
  const json& ls = array(field(j, "lumps", ""), "lumps");
  for (size_t i = 0; i < ls.size(); ++i) {
    std::string p = idx("lumps", i);
    Lump l;
    const json& shells = array(field(ls[i], "shells", p), sub(p, "shells"));
    for (size_t k = 0; k < shells.size(); ++k) l.shells.push_back(index(shells[k], idx(sub(p, "shells"), k), b.shells.size()));
    b.lumps.push_back(std::move(l));
  }
  auto rep = validateStructure(b);
  if (!rep.valid) throw Error(ErrorCode::kSchema, "structure: " + rep.violations.front().message);
  return doc;
}

Document load_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line, col = 1;
      else ++col;
    }
    throw Error(ErrorCode::kSchema,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON (" + e.what() + ")");
  }
  return document_from_json(j);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  out << data;
  if (!out) throw Error(ErrorCode::kInvalidArgument, "write failed for " + path);
}

Motion motion_from_json(const json& j) {
  if (!j.is_object()) schemaError("motion", "expected an object");
  const json& type = field(j, "type", "motion");
  if (!type.is_string()) schemaError("motion.type", "expected a string");
  const std::string t = type.get<std::string>();
  auto angle = [&]() {
    if (j.contains("angle_deg")) return number(j["angle_deg"], "motion.angle_deg") * M_PI / 180.0;
    return number(field(j, "angle", "motion"), "motion.angle");
  };
  auto axis = [&]() {
    Vec3 u = vec3(field(j, "axis", "motion"), "motion.axis");
    if (norm(u) < 1e-12) throw Error(ErrorCode::kInvalidArgument, "rotation axis has zero length");
    return u;
  };
  if (t == "translate") return Motion::translate(vec3(field(j, "vector", "motion"), "motion.vector"));
  if (t == "rotate") return Motion::rotate(vec3(field(j, "axis_point", "motion"), "motion.axis_point"), axis(), angle());
  if (t == "screw")
    return Motion::screw(vec3(field(j, "vector", "motion"), "motion.vector"),
                         vec3(field(j, "axis_point", "motion"), "motion.axis_point"), axis(), angle());
  schemaError("motion.type", "unknown motion type '" + t + "'");
}

json motion_to_json(const Motion& m) {
  json j;
  switch (m.kind) {
    case MotionKind::kTranslation: j["type"] = "translate"; break;
    case MotionKind::kRotation: j["type"] = "rotate"; break;
    case MotionKind::kScrew: j["type"] = "screw"; break;
  }
  if (m.kind != MotionKind::kRotation) j["vector"] = point(m.translation);
  if (m.kind != MotionKind::kTranslation) {
    j["axis_point"] = point(m.axis_point);
    j["axis"] = point(m.axis);
    j["angle"] = m.angle;
    j["angle_deg"] = m.angle * 180.0 / M_PI;
  }
  return j;
}

std::vector<VolumeSample> volume_samples(const Body& body, const PushPullRequest& request, int steps) {
  std::vector<VolumeSample> out;
  if (steps <= 0) return out;
  const ModelingSpaceBox box = modelingSpace(body, workspaceScale(request));
  for (int k = 0; k <= steps; ++k) {
    double t = double(k) / steps;
    PushPullRequest r = request;
    r.motion = request.motion.restricted(t);
    Body m = apply_push_pull(body, r, box).body;
    out.push_back({t, m.empty() ? 0.0 : volume(m)});
  }
  return out;
}

json trace_json(const PushPullTrace& trace, const std::vector<VolumeSample>& samples) {
  json j;
  j["version"] = 1;
  json events = json::array();
  for (size_t i = 0; i < trace.events.size(); ++i) {
    const auto& e = trace.events[i];
    double net = 0;
    if (i < trace.intervals.size())
      for (const auto& a : trace.intervals[i].auxes)
        net += (a.sign == AuxSign::kAdditive ? 1 : -1) * volume(a.body);
    json coincident = json::array();
    for (auto k : e.coincident) coincident.push_back(tcp_kind_name(k));
    events.push_back({{"t", e.t},
                      {"kind", tcp_kind_name(e.kind)},
                      {"entities", e.entity_tags},
                      {"entity_ids", e.entities},
                      {"coincident", coincident},
                      {"confirmed", e.confirmed},
                      {"interval_volume", net},
                      {"sign", net < 0 ? "subtractive" : "additive"}});
  }
  j["events"] = events;
  json intervals = json::array();
  for (const auto& iv : trace.intervals) {
    json auxes = json::array();
    for (const auto& a : iv.auxes)
      auxes.push_back({{"sign", aux_sign_name(a.sign)}, {"volume", volume(a.body)}, {"source_tags", a.source_tags}});
    intervals.push_back({{"t_a", iv.t_a},
                         {"t_b", iv.t_b},
                         {"auxiliaries", auxes},
                         {"volume_after", iv.volume_after},
                         {"faces_after", iv.faces_after},
                         {"front_area", iv.front_area}});
  }
  j["intervals"] = intervals;
  json steps = json::array();
  for (size_t i = 0; i < trace.step_t.size(); ++i)
    steps.push_back({{"t", trace.step_t[i]}, {"volume", trace.volumes[i]}, {"faces", trace.face_counts[i]}});
  j["steps"] = steps;
  json ss = json::array();
  for (const auto& s : samples) ss.push_back({{"t", s.t}, {"volume", s.volume}});
  j["samples"] = ss;
  j["notes"] = trace.notes;
  j["final_valid"] = trace.final_report.valid;
  j["workspace"] = {{"lo", point(trace.workspace.lo)}, {"hi", point(trace.workspace.hi)}};
  return j;
}

json mesh_json(const TriangleMesh& mesh) {
  json pos = json::array(), tris = json::array(), normals = json::array();
  for (const auto& p : mesh.positions) pos.insert(pos.end(), {p.x, p.y, p.z});
  for (const auto& t : mesh.triangles) tris.insert(tris.end(), {t[0], t[1], t[2]});
  for (const auto& n : mesh.normals) normals.insert(normals.end(), {n.x, n.y, n.z});
  return {{"positions", pos},
          {"triangles", tris},
          {"normals", normals},
          {"face_ids", mesh.face_ids},
          {"face_tags", mesh.face_tags},
          {"warnings", mesh.warnings}};
}

}  // namespace ppdm

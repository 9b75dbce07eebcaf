#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ppdm/boolean.hpp"
#include "ppdm/builder.hpp"
#include "ppdm/error.hpp"
#include "ppdm/fixtures.hpp"
#include "ppdm/io.hpp"
#include "ppdm/mass.hpp"
#include "ppdm/session.hpp"
#include "ppdm/tessellate.hpp"

using namespace ppdm;
using nlohmann::json;

namespace {

Body cube() { return make_fixture("box", {}); }

ErrorCode codeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInternalInvariant;
}

std::string messageOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

// Signed volume of an ASCII STL by the divergence theorem.
double stlVolume(const std::string& stl) {
  std::istringstream in(stl);
  std::string word;
  std::vector<Point3> tri;
  double v = 0;
  while (in >> word) {
    if (word != "vertex") continue;
    Point3 p;
    in >> p.x >> p.y >> p.z;
    tri.push_back(p);
    if (tri.size() == 3) {
      v += dot(tri[0], cross(tri[1], tri[2])) / 6.0;
      tri.clear();
    }
  }
  return v;
}

}  // namespace

TEST_CASE("save box document") {
  json doc = json::parse(save_document(cube()));
  CHECK(doc["version"] == 1);
  CHECK(doc["vertices"].size() == 8);
  CHECK(doc["edges"].size() == 12);
  CHECK(doc["faces"].size() == 6);
  CHECK(doc["planes"].size() == 6);
  CHECK(doc["lumps"].size() == 1);
}

TEST_CASE("document round trip is lossless") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    Body b = make_fixture(name, {});
    std::string once = save_document(b);
    Document d = load_document(once);
    CHECK(save_document(d.body) == once);
    CHECK(symdiff_volume(d.body, b) <= 1e-12);
    CHECK(validate(d.body).valid);
    Body c = canonicalize(b);
    REQUIRE(d.body.vertices.size() == c.vertices.size());
    for (size_t i = 0; i < c.vertices.size(); ++i) {
      CHECK(d.body.vertices[i].point.x == c.vertices[i].point.x);
      CHECK(d.body.vertices[i].point.y == c.vertices[i].point.y);
      CHECK(d.body.vertices[i].point.z == c.vertices[i].point.z);
    }
  }
  // Non-representable coordinates survive too.
  Rigid r;
  r.R = Mat3::rotation(normalized(Vec3{1, 1, 0.3}), 0.7);
  r.shift = {0.1, 1.0 / 3.0, -2.7};
  Body tilted = transformed(make_fixture("vslot", {}), r);
  std::string s = save_document(tilted, "in");
  Document d = load_document(s);
  CHECK(d.units == "in");
  CHECK(save_document(d.body, "in") == s);
}

TEST_CASE("schema errors name the field") {
  json doc = json::parse(save_document(cube()));
  json noFaces = doc;
  noFaces.erase("faces");
  CHECK(codeOf([&] { document_from_json(noFaces); }) == ErrorCode::kSchema);
  CHECK(messageOf([&] { document_from_json(noFaces); }).find("faces") != std::string::npos);

  json badLoop = doc;
  badLoop["faces"][2]["loops"][0][1].erase("edge");
  CHECK(messageOf([&] { document_from_json(badLoop); }).find("faces[2].loops[0][1].edge") != std::string::npos);

  json badId = doc;
  badId["edges"][0][1] = 99;
  CHECK(messageOf([&] { document_from_json(badId); }).find("out of range") != std::string::npos);

  json ver = doc;
  ver["version"] = 2;
  CHECK(codeOf([&] { document_from_json(ver); }) == ErrorCode::kVersionMismatch);

  std::string text = save_document(cube());
  std::string truncated = text.substr(0, text.size() / 2);
  CHECK(codeOf([&] { load_document(truncated); }) == ErrorCode::kSchema);
  CHECK(messageOf([&] { load_document(truncated); }).find("line") != std::string::npos);

  json open = doc;
  open["faces"][0]["loops"][0].erase(open["faces"][0]["loops"][0].size() - 1);
  CHECK(codeOf([&] { document_from_json(open); }) == ErrorCode::kSchema);
}

TEST_CASE("structurally sound but invalid solids load") {
  json doc = json::parse(save_document(cube()));
  doc["faces"].erase(doc["faces"].size() - 1);
  for (auto& s : doc["shells"]) {
    json kept = json::array();
    for (auto& f : s["faces"])
      if (f.get<int>() < 5) kept.push_back(f);
    s["faces"] = kept;
  }
  Document d = document_from_json(doc);
  auto rep = validate(d.body);
  CHECK_FALSE(rep.valid);
  CHECK(rep.has(2));
}

TEST_CASE("mesh export") {
  TriangleMesh m = tessellate(cube());
  std::string obj = toObj(m);
  int v = 0, f = 0, g = 0;
  std::istringstream in(obj);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("f ", 0) == 0) ++f;
    if (line.rfind("g ", 0) == 0) ++g;
  }
  CHECK(v == 8);
  CHECK(f == 12);
  CHECK(g == 6);

  CHECK(stlVolume(toStl(tessellate(make_fixture("vslot", {})))) == doctest::Approx(14.0).epsilon(1e-9));
  TriangleMesh e = tessellate(Body{});
  CHECK(e.triangles.empty());
  CHECK_FALSE(e.warnings.empty());
}

TEST_CASE("motion json round trip") {
  for (const Motion& m : {Motion::translate({1, 2, 3}), Motion::rotate({1, 0, 0}, {0, 1, 0}, 0.4),
                          Motion::screw({0, 0, 1}, {1, 1, 0}, {0, 0, 1}, -0.2)}) {
    Motion back = motion_from_json(motion_to_json(m));
    CHECK(back.kind == m.kind);
    Rigid a = transformAt(m, 0.7), b = transformAt(back, 0.7);
    Point3 p{0.3, -1.2, 2.5};
    CHECK(distance(a.apply(p), b.apply(p)) < 1e-12);
  }
  CHECK_THROWS_AS(motion_from_json(json{{"type", "wobble"}}), Error);
  CHECK_THROWS_AS(motion_from_json(json{{"type", "rotate"}, {"axis_point", {0, 0, 0}}, {"axis", {0, 0, 0}}, {"angle", 1}}),
                  Error);
}

TEST_CASE("trace json of the slotted push") {
  Body b = make_fixture("slotted_block", {});
  PushPullRequest r;
  r.tags = {"top"};
  r.motion = Motion::translate({0, 0, -4});
  auto res = apply_push_pull(b, r);
  auto samples = volume_samples(b, r, 8);
  json t = trace_json(res.trace, samples);
  REQUIRE(t["events"].size() == 2);
  CHECK(t["events"][0]["t"].get<double>() == doctest::Approx(0.5));
  CHECK(t["events"][1]["t"].get<double>() == doctest::Approx(0.75));
  CHECK(t["events"][0]["kind"] == "new_connection_outer");
  CHECK(t["events"][0]["sign"] == "subtractive");
  CHECK(t["events"][0]["interval_volume"].get<double>() == doctest::Approx(-32.0));
  REQUIRE(t["samples"].size() == 9);
  CHECK(t["samples"][0]["volume"].get<double>() == doctest::Approx(56.0));
  CHECK(t["samples"][2]["volume"].get<double>() == doctest::Approx(40.0));
  CHECK(t["samples"][8]["volume"].get<double>() == doctest::Approx(0.0));
}

TEST_CASE("session: load, preview, commit, undo") {
  Session s;
  json meta = s.handle({{"op", "load"}, {"fixture", "box"}});
  REQUIRE(meta["op"] == "model_meta");
  CHECK(meta["volume"].get<double>() == doctest::Approx(1.0));

  json sel = s.handle({{"op", "select"}, {"tags", {"top"}}});
  CHECK(sel["op"] == "face_list");
  CHECK(sel["selection"] == json::array({"top"}));

  json motion = {{"type", "translate"}, {"vector", {0, 0, 0.5}}};
  json pv = s.handle({{"op", "preview"}, {"motion", motion}, {"t", 1.0}});
  REQUIRE(pv["op"] == "mesh");
  CHECK(pv["volume"].get<double>() == doctest::Approx(1.5));
  CHECK(pv["mesh"]["face_tags"].size() == pv["mesh"]["triangles"].size() / 3);
  // Preview is pure.
  CHECK(volume(s.model()) == doctest::Approx(1.0));
  json half = s.handle({{"op", "preview"}, {"motion", motion}, {"t", 0.5}});
  CHECK(half["volume"].get<double>() == doctest::Approx(1.25));
  json faces = s.handle({{"op", "list_faces"}});
  CHECK(faces["faces"].size() == 6);

  json before = s.handle({{"op", "export_mesh"}, {"format", "json"}});
  json cm = s.handle({{"op", "commit"}, {"motion", motion}});
  REQUIRE(cm["op"] == "mesh");
  CHECK(cm["volume"].get<double>() == doctest::Approx(1.5));
  CHECK(volume(s.model()) == doctest::Approx(1.5));

  json un = s.handle({{"op", "undo"}});
  REQUIRE(un["op"] == "mesh");
  CHECK(un["volume"].get<double>() == doctest::Approx(1.0));
  json after = s.handle({{"op", "export_mesh"}, {"format", "json"}});
  CHECK(after.dump() == before.dump());

  json nothing = s.handle({{"op", "undo"}});
  CHECK(nothing["op"] == "error");
}

TEST_CASE("session errors leave the state intact") {
  Session s;
  CHECK(s.handle({{"op", "preview"}, {"motion", {{"type", "translate"}, {"vector", {0, 0, 1}}}}})["op"] == "error");
  s.handle({{"op", "load"}, {"fixture", "vslot"}});
  json bad = s.handle({{"op", "select"}, {"tags", {"nope"}}});
  CHECK(bad["op"] == "error");
  CHECK(bad["code"] == "unknown_entity");
  CHECK(s.handle({{"op", "frobnicate"}})["op"] == "error");
  CHECK(s.handle(json::array())["op"] == "error");
  CHECK(s.handle({{"op", "preview"}, {"tags", {"top_left"}}, {"motion", {{"type", "spin"}}}})["code"] == "schema_error");
  CHECK(s.handle({{"op", "preview"}, {"tags", {"top_left"}}, {"motion", {{"type", "translate"}, {"vector", {0, 0, 1}}}}, {"t", 2}})["op"] ==
        "error");
  CHECK(volume(s.model()) == doctest::Approx(14.0));
  CHECK(s.handle({{"op", "list_faces"}})["faces"].size() == 9);
}

TEST_CASE("session undo depth") {
  Session s;
  s.handle({{"op", "load"}, {"fixture", "box"}});
  json up = {{"type", "translate"}, {"vector", {0, 0, 0.1}}};
  for (int i = 0; i < 20; ++i) REQUIRE(s.handle({{"op", "commit"}, {"tags", {"top"}}, {"motion", up}})["op"] == "mesh");
  CHECK(volume(s.model()) == doctest::Approx(3.0));
  for (int i = 0; i < 16; ++i) REQUIRE(s.handle({{"op", "undo"}})["op"] == "mesh");
  CHECK(volume(s.model()) == doctest::Approx(1.4));
}

TEST_CASE("session two-event preview") {
  Session s;
  s.handle({{"op", "load"}, {"fixture", "slotted_block"}});
  json pv = s.handle({{"op", "preview"},
                      {"tags", {"top"}},
                      {"motion", {{"type", "translate"}, {"vector", {0, 0, -2.5}}}},
                      {"seq", 7}});
  REQUIRE(pv["op"] == "mesh");
  CHECK(pv["seq"] == 7);
  CHECK(pv["trace"]["events"].size() == 1);
  json load = s.handle({{"op", "load"}, {"document", json::parse(save_document(make_fixture("slotted_block", {})))}});
  CHECK(load["op"] == "model_meta");
}

#include "ppdm/session.hpp"

#include <algorithm>

#include "ppdm/error.hpp"
#include "ppdm/fixtures.hpp"
#include "ppdm/io.hpp"
#include "ppdm/mass.hpp"
#include "ppdm/pushpull.hpp"
#include "ppdm/tessellate.hpp"
#include "ppdm/validate.hpp"

namespace ppdm {

using nlohmann::json;

json error_response(const std::exception& e) {
  if (auto* pe = dynamic_cast<const Error*>(&e)) return {{"op", "error"}, {"code", code_name(pe->code())}, {"message", pe->what()}};
  if (dynamic_cast<const json::exception*>(&e)) return {{"op", "error"}, {"code", "schema_error"}, {"message", e.what()}};
  return {{"op", "error"}, {"code", "internal_invariant"}, {"message", e.what()}};
}

namespace {

void requireObject(const json& req) {
  if (!req.is_object()) throw Error(ErrorCode::kSchema, "request must be a JSON object");
}

json meshPayload(const Body& b) { return mesh_json(tessellate(b)); }

double safeVolume(const Body& b) { return b.empty() ? 0.0 : volume(b); }

}  // namespace

json Session::handle(const json& request) {
  try {
    requireObject(request);
    auto it = request.find("op");
    if (it == request.end() || !it->is_string()) throw Error(ErrorCode::kSchema, "field 'op': missing");
    return handle(it->get<std::string>(), request);
  } catch (const std::exception& e) {
    return error_response(e);
  }
}

json Session::handle(const std::string& op, const json& request) {
  try {
    requireObject(request);
    if (op == "load") return load(request);
    if (op == "list_faces") return list_faces(request);
    if (op == "select") return select(request);
    if (op == "preview") return preview(request);
    if (op == "commit") return commit(request);
    if (op == "undo") return undo(request);
    if (op == "export_mesh") return export_mesh(request);
    throw Error(ErrorCode::kSchema, "unknown op '" + op + "'");
  } catch (const std::exception& e) {
    return error_response(e);
  }
}

json Session::meta(const State& s) const {
  json tags = json::array();
  for (const auto& t : s.body.tags()) tags.push_back(t);
  json m = {{"op", "model_meta"},
            {"units", s.units},
            {"faces", s.body.faces.size()},
            {"volume", safeVolume(s.body)},
            {"valid", validate(s.body).valid},
            {"tags", tags},
            {"selection", s.selection},
            {"undo_depth", undo_.size()}};
  Point3 lo, hi;
  if (s.body.bounds(lo, hi)) m["bounds"] = {{"lo", {lo.x, lo.y, lo.z}}, {"hi", {hi.x, hi.y, hi.z}}};
  return m;
}

std::vector<std::string> Session::tagsFor(const json& req, const State& s) const {
  std::vector<std::string> tags;
  if (req.contains("tags")) {
    if (!req["tags"].is_array()) throw Error(ErrorCode::kSchema, "field 'tags': expected an array of strings");
    for (const auto& t : req["tags"]) {
      if (!t.is_string()) throw Error(ErrorCode::kSchema, "field 'tags': expected an array of strings");
      tags.push_back(t.get<std::string>());
    }
  } else {
    tags = s.selection;
  }
  if (tags.empty()) throw Error(ErrorCode::kInvalidArgument, "no faces selected");
  for (const auto& t : tags)
    if (s.body.facesWithTag(t).empty()) throw Error(ErrorCode::kUnknownEntity, "no face tagged " + t);
  return tags;
}

json Session::load(const json& req) {
  State next;
  if (req.contains("document")) {
    Document d = req["document"].is_string() ? load_document(req["document"].get<std::string>())
                                             : document_from_json(req["document"]);
    next.body = d.body;
    next.units = d.units;
  } else if (req.contains("fixture")) {
    if (!req["fixture"].is_string()) throw Error(ErrorCode::kSchema, "field 'fixture': expected a string");
    Params p;
    if (req.contains("params")) {
      if (!req["params"].is_object()) throw Error(ErrorCode::kSchema, "field 'params': expected an object");
      for (auto& [k, v] : req["params"].items()) {
        if (!v.is_number()) throw Error(ErrorCode::kSchema, "field 'params." + k + "': expected a number");
        p[k] = v.get<double>();
      }
    }
    next.body = make_fixture(req["fixture"].get<std::string>(), p);
  } else {
    throw Error(ErrorCode::kSchema, "load needs 'document' or 'fixture'");
  }
  auto rep = validate(next.body);
  if (!rep.valid) throw Error(ErrorCode::kInvalidBody, "model is not a valid solid: " + rep.violations.front().message);
  std::lock_guard<std::mutex> lock(mutex_);
  state_ = std::move(next);
  loaded_ = true;
  undo_.clear();
  ++preview_seq_;
  return meta(state_);
}

json Session::list_faces(const json&) {
  std::lock_guard<std::mutex> lock(mutex_);
  json faces = json::array();
  for (int f = 0; f < static_cast<int>(state_.body.faces.size()); ++f) {
    Plane pl = state_.body.facePlane(f);
    const std::string& tag = state_.body.faces[f].tag;
    bool sel = std::find(state_.selection.begin(), state_.selection.end(), tag) != state_.selection.end();
    faces.push_back({{"id", f},
                     {"tag", tag},
                     {"area", faceArea(state_.body, f)},
                     {"normal", {pl.normal.x, pl.normal.y, pl.normal.z}},
                     {"selected", sel}});
  }
  return {{"op", "face_list"}, {"faces", faces}, {"selection", state_.selection}};
}

json Session::select(const json& req) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!loaded_) throw Error(ErrorCode::kInvalidArgument, "no model loaded");
    std::string mode = req.value("mode", std::string("replace"));
    std::vector<std::string> tags;
    if (!req.contains("tags") || !req["tags"].is_array()) throw Error(ErrorCode::kSchema, "field 'tags': missing");
    for (const auto& t : req["tags"]) {
      if (!t.is_string()) throw Error(ErrorCode::kSchema, "field 'tags': expected an array of strings");
      if (state_.body.facesWithTag(t.get<std::string>()).empty())
        throw Error(ErrorCode::kUnknownEntity, "no face tagged " + t.get<std::string>());
      tags.push_back(t.get<std::string>());
    }
    std::vector<std::string> sel = mode == "replace" ? std::vector<std::string>{} : state_.selection;
    if (mode != "replace" && mode != "add" && mode != "toggle")
      throw Error(ErrorCode::kSchema, "field 'mode': expected replace, add or toggle");
    for (const auto& t : tags) {
      auto it = std::find(sel.begin(), sel.end(), t);
      if (it == sel.end()) sel.push_back(t);
      else if (mode == "toggle") sel.erase(it);
    }
    state_.selection = sel;
  }
  return list_faces(req);
}

json Session::preview(const json& req) {
  const unsigned long long seq = ++preview_seq_;
  State snapshot;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!loaded_) throw Error(ErrorCode::kInvalidArgument, "no model loaded");
    snapshot = state_;
  }
  PushPullRequest pr;
  pr.tags = tagsFor(req, snapshot);
  if (!req.contains("motion")) throw Error(ErrorCode::kSchema, "field 'motion': missing");
  Motion full = motion_from_json(req["motion"]);
  double t = 1.0;
  if (req.contains("t")) {
    if (!req["t"].is_number()) throw Error(ErrorCode::kSchema, "field 't': expected a number");
    t = req["t"].get<double>();
  }
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "t must lie in [0, 1]");
  pr.motion = full.restricted(t);
  auto res = apply_push_pull(snapshot.body, pr);
  if (seq != preview_seq_.load())
    return {{"op", "error"}, {"code", "superseded"}, {"message", "a newer preview replaced this one"}};
  json out = {{"op", "mesh"},
              {"mesh", meshPayload(res.body)},
              {"trace", trace_json(res.trace)},
              {"volume", safeVolume(res.body)},
              {"valid", res.trace.final_report.valid},
              {"t", t}};
  if (req.contains("seq")) out["seq"] = req["seq"];
  return out;
}

json Session::commit(const json& req) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!loaded_) throw Error(ErrorCode::kInvalidArgument, "no model loaded");
  PushPullRequest pr;
  pr.tags = tagsFor(req, state_);
  if (!req.contains("motion")) throw Error(ErrorCode::kSchema, "field 'motion': missing");
  pr.motion = motion_from_json(req["motion"]);
  auto res = apply_push_pull(state_.body, pr);
  undo_.push_back(state_);
  while (undo_.size() > kUndoDepth) undo_.pop_front();
  state_.body = std::move(res.body);
  std::vector<std::string> kept;
  for (const auto& t : state_.selection)
    if (!state_.body.facesWithTag(t).empty()) kept.push_back(t);
  state_.selection = kept;
  ++preview_seq_;
  return {{"op", "mesh"},
          {"mesh", meshPayload(state_.body)},
          {"trace", trace_json(res.trace)},
          {"volume", safeVolume(state_.body)},
          {"valid", res.trace.final_report.valid},
          {"meta", meta(state_)}};
}

json Session::undo(const json&) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (undo_.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing to undo");
  state_ = std::move(undo_.back());
  undo_.pop_back();
  ++preview_seq_;
  return {{"op", "mesh"}, {"mesh", meshPayload(state_.body)}, {"volume", safeVolume(state_.body)}, {"meta", meta(state_)}};
}

json Session::export_mesh(const json& req) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!loaded_) throw Error(ErrorCode::kInvalidArgument, "no model loaded");
  std::string format = req.value("format", std::string("json"));
  TriangleMesh mesh = tessellate(state_.body);
  if (format == "json") return {{"op", "mesh"}, {"format", format}, {"mesh", mesh_json(mesh)}};
  if (format == "obj") return {{"op", "mesh"}, {"format", format}, {"data", toObj(mesh)}};
  if (format == "stl") return {{"op", "mesh"}, {"format", format}, {"data", toStl(mesh)}};
  throw Error(ErrorCode::kSchema, "field 'format': expected json, obj or stl");
}

Body Session::model() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return state_.body;
}

size_t Session::undo_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return undo_.size();
}

}  // namespace ppdm

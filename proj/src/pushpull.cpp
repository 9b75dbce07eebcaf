#include <algorithm>
#include <cmath>

#include "ppdm/error.hpp"
#include "ppdm/mass.hpp"
#include "ppdm/pushpull.hpp"

namespace ppdm {

namespace {

constexpr int kMaxIntervals = 64;

double frontArea(const Body& body, const std::vector<PushPullContext>& contexts) {
  double a = 0.0;
  for (const auto& c : contexts)
    for (int f : c.pp_faces) a += faceArea(body, f);
  return a;
}

// Faces lying on a moved pp plane take that face's tag.
void retag(Body& body, const std::vector<std::pair<Plane, std::string>>& moved) {
  for (auto& face : body.faces) {
    Plane pl = body.facePlane(static_cast<int>(&face - body.faces.data()));
    for (const auto& [mp, tag] : moved)
      if (samePlane(pl, mp, 1e-7, 1e-7 * std::max(1.0, std::abs(mp.offset)))) {
        face.tag = tag;
        break;
      }
  }
}

}  // namespace

PushPullResult apply_push_pull(const Body& body, const PushPullRequest& request) {
  return apply_push_pull(body, request, modelingSpace(body, workspaceScale(request)));
}

PushPullResult apply_push_pull(const Body& body, const PushPullRequest& request, const ModelingSpaceBox& box) {
  if (request.tags.empty()) throw Error(ErrorCode::kInvalidArgument, "no faces selected");
  auto rep = validate(body);
  if (!rep.valid) throw Error(ErrorCode::kInvalidBody, "input body is not a valid solid: " + rep.violations.front().message);
  for (const auto& tag : request.tags)
    if (body.facesWithTag(tag).empty()) throw Error(ErrorCode::kUnknownEntity, "no face tagged " + tag);

  PushPullResult res;
  PushPullTrace& tr = res.trace;
  tr.workspace = box;
  Body m = body;
  double t = 0.0;
  tr.step_t.push_back(0.0);
  tr.volumes.push_back(volume(m));
  tr.face_counts.push_back(static_cast<int>(m.faces.size()));

  std::vector<std::string> live = request.tags;
  for (int iter = 0; t < 1.0; ++iter) {
    if (iter >= kMaxIntervals) throw Error(ErrorCode::kInternalInvariant, "too many topology changes");
    auto contexts = merge_adjacent_faces(m, live);
    auto ev = detect_next_tcp(m, contexts, request.motion, t, box);
    double t_next = ev ? ev->t : 1.0;

    IntervalRecord rec;
    rec.t_a = t;
    rec.t_b = t_next;
    rec.front_area = frontArea(m, contexts);
    std::vector<AuxiliaryVolume> auxes;
    for (const auto& ctx : contexts) {
      auto parts = build_auxiliary(m, ctx, request.motion, t, t_next, &box);
      auxes.insert(auxes.end(), parts.begin(), parts.end());
    }
    auxes = subdivide_overlaps(std::move(auxes));
    if (request.reverse_aux_order) std::reverse(auxes.begin(), auxes.end());

    const Rigid rel = relativeTransform(request.motion, t, t_next);
    std::vector<std::pair<Plane, std::string>> moved;
    for (const auto& ctx : contexts)
      for (int f : ctx.pp_faces) moved.push_back({rel.apply(m.facePlane(f)), m.faces[f].tag});

    m = apply_auxiliaries(m, auxes);
    retag(m, moved);

    rec.auxes = std::move(auxes);
    rec.volume_after = volume(m);
    rec.faces_after = static_cast<int>(m.faces.size());
    tr.intervals.push_back(std::move(rec));
    if (ev) tr.events.push_back(*ev);
    t = t_next;
    tr.step_t.push_back(t);
    tr.volumes.push_back(tr.intervals.back().volume_after);
    tr.face_counts.push_back(tr.intervals.back().faces_after);

    std::vector<std::string> still;
    for (const auto& tag : live) {
      if (m.facesWithTag(tag).empty()) tr.notes.push_back("face " + tag + " vanished at t=" + std::to_string(t));
      else still.push_back(tag);
    }
    live = std::move(still);
    if (live.empty() && t < 1.0) {
      tr.notes.push_back("no moving face remains; stopping");
      break;
    }
  }
  tr.final_report = validate(m);
  res.body = std::move(m);
  return res;
}

}  // namespace ppdm

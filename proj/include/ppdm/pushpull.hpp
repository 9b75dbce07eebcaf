#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ppdm/brep.hpp"
#include "ppdm/geometry.hpp"
#include "ppdm/validate.hpp"

namespace ppdm {

inline constexpr double kEpsConfirm = 1e-6;
inline constexpr double kDefaultWorkspaceScale = 1000.0;

struct PushPullRequest {
  std::vector<std::string> tags;  // pp faces by origin tag
  Motion motion;
  double workspace_scale = 0.0;     // 0: PPDM_MODELING_SPACE_SCALE or the default
  bool reverse_aux_order = false;   // apply auxiliary parts in reverse order (order-independence checks)
};

/// Scale used for the modeling-space box of a request.
double workspaceScale(const PushPullRequest& request);

// ---------------------------------------------------------------------------
// Regeneration

enum class IllBoundedKind { kOpenBoundary, kExtraIntersection };
const char* ill_bounded_name(IllBoundedKind k);

struct IllBoundedEntry {
  IllBoundedKind kind = IllBoundedKind::kOpenBoundary;
  int face = -1;
  std::string tag;
  std::string message;
};

struct IllBoundedReport {
  std::vector<IllBoundedEntry> entries;
  bool empty() const { return entries.empty(); }
  bool has(IllBoundedKind kind) const;
  bool has(IllBoundedKind kind, const std::string& tag) const;
};

struct RegenResult {
  bool ok = false;
  Body body;
  IllBoundedReport report;
};

/// Moves the planes of faces tagged in `pp_tags` by `transform` and recomputes
/// their vertices from the incident planes, keeping the topology graph.
/// Vertices with more than three incident planes that no longer meet throw
/// kNonManifoldVertex.
RegenResult regenerate(const Body& body, const std::set<std::string>& pp_tags, const Rigid& transform);

/// Geometry part of regenerate without validation. Returns false when some
/// vertex has no solution; `failed` receives those vertex ids.
bool regenerateGeometry(const Body& body, const std::set<std::string>& pp_tags, const Rigid& transform, Body& out,
                        std::vector<int>* failed = nullptr);

// ---------------------------------------------------------------------------
// Contexts and events

struct PushPullContext {
  std::set<int> pp_faces;
  std::set<int> nei_faces;
  std::vector<std::string> pp_tags;
  std::vector<Plane> start_surfaces;  // outward planes of the pp faces at the interval start
  bool merged = false;
};

/// Edge-connected groups of the faces carrying the request tags.
std::vector<PushPullContext> merge_adjacent_faces(const Body& body, const PushPullRequest& request);
std::vector<PushPullContext> merge_adjacent_faces(const Body& body, const std::vector<std::string>& tags);

enum class TcpKind { kNewConnectionInner, kNewConnectionOuter, kLostConnectionTangency, kLostConnectionWorkspace };
const char* tcp_kind_name(TcpKind k);

struct TcpEvent {
  double t = 1.0;
  TcpKind kind = TcpKind::kNewConnectionOuter;
  std::vector<int> entities;            // face ids in the model at the interval start
  std::vector<std::string> entity_tags;
  std::vector<TcpKind> coincident;      // kinds of other candidates merged into this event
  bool confirmed = false;
};

struct TcpCandidate {
  double t;
  TcpKind kind;
  std::vector<int> faces;
};

/// Candidate parameters in (t_from, 1) for all contexts, unconfirmed and sorted.
std::vector<TcpCandidate> tcp_candidates(const Body& body, const std::vector<PushPullContext>& contexts,
                                         const Motion& motion, double t_from, const ModelingSpaceBox& box);

/// Next confirmed topology change in (t_from, 1), or none.
std::optional<TcpEvent> detect_next_tcp(const Body& body, const std::vector<PushPullContext>& contexts,
                                        const Motion& motion, double t_from, const ModelingSpaceBox& box);
std::optional<TcpEvent> detect_next_tcp(const Body& body, const PushPullContext& context, const Motion& motion,
                                        double t_from);

/// Rigid map taking the model at t_from to the model at t.
Rigid relativeTransform(const Motion& motion, double t_from, double t);

/// Regeneration outcome used to compare the two sides of a candidate event.
struct RegenSignature {
  bool valid = false;
  bool in_box = false;
  TopologySignature topology;
  bool operator==(const RegenSignature&) const = default;
};
RegenSignature regenSignature(const Body& body, const std::set<std::string>& pp_tags, const Motion& motion,
                              double t_from, double t, const ModelingSpaceBox& box);

// ---------------------------------------------------------------------------
// Auxiliary volumes

enum class AuxSign { kAdditive, kSubtractive };
const char* aux_sign_name(AuxSign s);

struct AuxiliaryVolume {
  Body body;
  AuxSign sign = AuxSign::kSubtractive;
  double t_a = 0.0, t_b = 1.0;
  std::vector<std::string> source_tags;
};

/// Signed swept volumes of the context's faces over [t_a, t_b]. Parts of one
/// sign within a context are united. Parts reaching past `box` are clipped to it.
std::vector<AuxiliaryVolume> build_auxiliary(const Body& body, const PushPullContext& context, const Motion& motion,
                                             double t_a, double t_b, const ModelingSpaceBox* box = nullptr);

/// Splits overlapping auxes into disjoint parts: A −* I, B −* I, and I once
/// when the signs agree (dropped when they cancel).
std::vector<AuxiliaryVolume> subdivide_overlaps(std::vector<AuxiliaryVolume> auxes);

/// M −* (subtractive parts) ∪* (additive parts), in list order.
Body apply_auxiliaries(const Body& body, const std::vector<AuxiliaryVolume>& auxes);

// ---------------------------------------------------------------------------
// Main loop

struct IntervalRecord {
  double t_a = 0.0, t_b = 1.0;
  std::vector<AuxiliaryVolume> auxes;
  double volume_after = 0.0;
  int faces_after = 0;
  double front_area = 0.0;  // total pp face area at t_a
};

struct PushPullTrace {
  std::vector<TcpEvent> events;
  std::vector<IntervalRecord> intervals;
  std::vector<double> step_t;    // t_0 = 0, t_1, ..., 1
  std::vector<double> volumes;   // vol(M(t_i))
  std::vector<int> face_counts;
  ValidityReport final_report;
  std::vector<std::string> notes;
  ModelingSpaceBox workspace;
};

struct PushPullResult {
  Body body;
  PushPullTrace trace;
};

PushPullResult apply_push_pull(const Body& body, const PushPullRequest& request);

/// Same loop, starting from an explicit workspace box (used by restricted replays).
PushPullResult apply_push_pull(const Body& body, const PushPullRequest& request, const ModelingSpaceBox& box);

}  // namespace ppdm

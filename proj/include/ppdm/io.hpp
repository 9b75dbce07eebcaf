#pragma once

#include <string>

#include <json.hpp>

#include "ppdm/brep.hpp"
#include "ppdm/pushpull.hpp"
#include "ppdm/tessellate.hpp"

namespace ppdm {

inline constexpr int kDocumentVersion = 1;

struct Document {
  Body body;
  std::string units = "mm";
};

/// BREP-JSON v1 text of the canonicalized body.
std::string save_document(const Body& body, const std::string& units = "mm");
nlohmann::json document_json(const Body& body, const std::string& units = "mm");

/// Parses BREP-JSON v1 and checks structure (ids resolve, loops closed).
/// Throws kSchema with a line or field path, kVersionMismatch for other versions.
Document load_document(const std::string& text);
Document document_from_json(const nlohmann::json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& data);

/// Motion from {"type": translate|rotate|screw, "vector", "axis_point", "axis", "angle_deg"}.
Motion motion_from_json(const nlohmann::json& j);
nlohmann::json motion_to_json(const Motion& m);

/// Per-step volumes of the motion restricted to k/steps, k = 0..steps.
struct VolumeSample {
  double t;
  double volume;
};
std::vector<VolumeSample> volume_samples(const Body& body, const PushPullRequest& request, int steps);

nlohmann::json trace_json(const PushPullTrace& trace, const std::vector<VolumeSample>& samples = {});

nlohmann::json mesh_json(const TriangleMesh& mesh);

}  // namespace ppdm

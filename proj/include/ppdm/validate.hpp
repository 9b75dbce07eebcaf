#pragma once

#include <string>
#include <vector>

#include "ppdm/brep.hpp"

namespace ppdm {

/// What exactly went wrong; the condition number alone is often too coarse
/// for callers that need to react (regeneration diagnosis, tests).
enum class ViolationKind {
  kStructural,        // dangling id
  kOpenLoop,          // loop chain not closed / too short
  kOffPlane,          // vertex not on its face plane
  kOrientation,       // outer loop not CCW or hole not CW about the outward normal
  kDegenerateFace,    // zero area
  kSelfIntersection,  // loop crosses itself or another loop of the face
  kHoleOutside,       // inner loop not inside the outer loop
  kEdgeUse,           // edge not used exactly twice with opposite senses
  kVertexFan,         // faces around a vertex do not form one closed fan
  kInterference,      // faces meet away from shared edges/vertices
};

struct Violation {
  int condition = 0;  // 0 structural, else 1..4
  ViolationKind kind = ViolationKind::kStructural;
  std::vector<int> entities;  // face ids, or edge/vertex ids for conditions 2/3
  std::string message;
};

struct ValidityReport {
  bool valid = true;
  std::vector<Violation> violations;

  bool has(int condition) const;
  bool has(ViolationKind kind) const;
};

/// Checks structural integrity and the four solidity conditions. Condition 4
/// is an exhaustive pairwise face interference test.
ValidityReport validate(const Body& body);

/// Structural part only (ids resolve, loops closed); used when loading files.
ValidityReport validateStructure(const Body& body);

}  // namespace ppdm

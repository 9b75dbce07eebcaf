#pragma once

#include <map>
#include <vector>

#include "ppdm/brep.hpp"

namespace ppdm {

/// Signed area of a face: outer loop minus holes, measured along the outward normal.
double faceArea(const Body& body, int face);
std::map<int, double> face_areas(const Body& body);

/// Divergence-theorem volume of a subset of faces: (1/3) Σ offset·area.
double faceSetVolume(const Body& body, const std::vector<int>& faces);

/// Volume of a valid body; throws kInvalidBody otherwise. Voids subtract.
double volume(const Body& body);
/// Same integral without the validity gate, for internal bookkeeping.
double volumeUnchecked(const Body& body);

/// Generalised winding number of the closed face set about p (solid angles of
/// the triangulated faces over 4π). ~1 inside, ~0 outside.
double windingNumber(const Body& body, const std::vector<int>& faces, const Point3& p);
double windingNumber(const Body& body, const Point3& p);

}  // namespace ppdm

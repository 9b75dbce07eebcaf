#pragma once

#include <string>
#include <vector>

#include "ppdm/brep.hpp"

namespace ppdm {

/// One planar polygon of a closed polygon soup. `plane` is the outward
/// orientation; point order is normalised to it by the builder.
struct SoupPolygon {
  std::vector<Point3> points;
  Plane plane;
  std::string tag;
};

/// Stitches a closed soup of planar polygons into a Body.
///
/// Vertices are welded within kEpsGeom, T-junctions are split, coplanar
/// polygons with the same orientation are merged into maximal faces (shared
/// interior edges cancel), collinear degree-2 vertices are dropped, and
/// shells/lumps are recovered from edge connectivity and orientation.
/// Earlier polygons win when merged faces need a single tag.
///
/// The result is not validated here; callers decide how to treat failures.
Body buildBody(const std::vector<SoupPolygon>& soup);

/// Soup view of an existing body, one polygon per face loop set (holes are
/// represented by triangulating faces that have inner loops).
std::vector<SoupPolygon> toSoup(const Body& body);

/// Renumbers entities into canonical order (faces by tag then geometry,
/// vertices/edges by first use). Geometry is untouched.
Body canonicalize(const Body& body);

/// Returns a copy with every face orientation reversed (complement boundary).
Body reversed(const Body& body);

}  // namespace ppdm

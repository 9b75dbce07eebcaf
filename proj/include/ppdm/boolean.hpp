#pragma once

#include <cstdint>

#include "ppdm/brep.hpp"

namespace ppdm {

enum class BoolKind { kUnion, kDifference, kIntersection };

/// Regularised set operation. Both inputs must be valid; the result is
/// validated and a failure throws kRobustnessFailure. Result faces keep the
/// tag of the input face whose plane produced them (a's tag wins on shared
/// coplanar faces).
Body bool_op(const Body& a, const Body& b, BoolKind kind);

enum class Classification { kInside, kOutside, kOnBoundary };
const char* classification_name(Classification c);

/// Ray-casting parity with an ε_geom boundary band; the ray is re-cast in
/// the next fixed direction whenever it grazes an edge or lies in a face.
Classification classify_point(const Body& body, const Point3& p);

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};
/// Monte-Carlo volume over the bounding box using classify_point.
McEstimate mc_volume(const Body& body, long samples, std::uint64_t seed);

/// vol(a −* b) + vol(b −* a).
double symdiff_volume(const Body& a, const Body& b);
/// |vol(a) − vol(b)|
double volume_gap(const Body& a, const Body& b);

}  // namespace ppdm

#pragma once

#include <map>
#include <string>
#include <vector>

#include "ppdm/brep.hpp"
#include "ppdm/polygon.hpp"

namespace ppdm {

using Params = std::map<std::string, double>;

/// Catalog: box, step_block, slotted_block, vslot, dovetail_over_holes,
/// crank_step, notch_block, rot_wedge_base. Unknown names or parameters and
/// degenerate parameter sets throw kInvalidArgument.
Body make_fixture(const std::string& name, const Params& params = {});

std::vector<std::string> fixture_names();

/// Default parameters of a fixture (all accepted keys).
Params fixture_defaults(const std::string& name);

/// Profile in the xz plane extruded along y over [0, depth]. The outer loop
/// is counter-clockwise (x right, z up), holes clockwise; edge i of a loop
/// runs from point i to point i+1 and gets tags[i]. Caps are tagged front
/// (y=0) and back (y=depth).
struct Profile {
  struct Ring {
    std::vector<Vec2> points;
    std::vector<std::string> tags;
  };
  Ring outer;
  std::vector<Ring> holes;
};
Body extrude(const Profile& profile, double depth);

}  // namespace ppdm

#pragma once

#include <string>
#include <string_view>

#include "planettt/designs.hpp"

namespace planettt {

// Line-oriented text format:
//
//   affine-plane <order>
//   points <name> <name> ...
//   index-class <label>
//   class <label>
//   line <name> <name> ...
//   ...
//
// '#' starts a comment. Writers emit the canonical form (classes in plane
// order, lines sorted within a class) so output is byte-stable.
std::string write_plane_text(const AffinePlane& plane);
AffinePlane read_plane_text(std::string_view text);

// The same information as a JSON document:
// {"type":"affine-plane","order":n,"points":[...],"index_class":label,
//  "classes":[{"label":..,"lines":[[..],..]},..]}
std::string write_plane_json(const AffinePlane& plane);
AffinePlane read_plane_json(std::string_view text);

// Detects JSON by its leading '{'.
AffinePlane read_plane(std::string_view text);

std::string write_mols_text(const MolsSet& mols);
std::string write_transversal_design_text(const TransversalDesign& td);
// {"type":"mols","order":n,"squares":[[[..],..],..]}
std::string write_mols_json(const MolsSet& mols);
// {"type":"transversal-design","k":k,"n":n,"groups":[[..],..],
//  "classes":[{"label":..,"blocks":[[..],..]},..]} or "blocks" when unresolved
std::string write_transversal_design_json(const TransversalDesign& td);

}  // namespace planettt

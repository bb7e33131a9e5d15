#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "morph/scenario.hpp"

namespace morph {

std::vector<std::string> builtin_names();
std::optional<Scenario> builtin_scenario(std::string_view name);

Scenario chain_scenario(int modules);
Scenario branch_scenario(int modules);
Scenario table_scenario();

/// Palm slab at z <= 0 with eight seeds near its center, growing along
/// `bias` toward `object`.
Scenario grasp_scenario(const Vec3& bias, std::vector<CellCoord> object);

/// Lattice cells within `radius` of `center` (a rough ball).
std::vector<CellCoord> lattice_ball(const Vec3& center, double radius);

}  // namespace morph

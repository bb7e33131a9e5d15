#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "morph/lattice.hpp"

namespace morph {

/// Face-adjacency lists over a module table, indexed by module id.
using Adjacency = std::vector<std::vector<ModuleId>>;

Adjacency build_adjacency(std::span<const CellCoord> cells, const OccupancyMap& occupancy);

/// True if all vertices not marked in `removed` form one component.
bool is_connected(const Adjacency& graph, const std::vector<bool>& removed = {});

/// Articulation-vertex flags (iterative Tarjan low-link).
std::vector<bool> articulation_points(const Adjacency& graph);

}  // namespace morph

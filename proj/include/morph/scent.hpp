#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "morph/graph.hpp"
#include "morph/lattice.hpp"

namespace morph {

/// Hop-count gradient channels. A module stores one value per channel;
/// smaller means closer to an emitter.
enum class Channel : std::uint8_t { Regular = 0, Node = 1 };

inline constexpr std::size_t kMaxChannels = 2;
inline constexpr std::uint32_t kDefaultScentCap = 65535;

using ScentValues = std::array<std::uint32_t, kMaxChannels>;

enum class ScentRole : std::uint8_t { Emit, Propagate, Inert };

std::string_view to_string(Channel c);
std::string_view to_string(ScentRole r);

/// One synchronous update of a channel from previous-tick values:
/// emitters become 0, propagators take 1 + the minimum neighbor value
/// (capped), inert or isolated modules keep their value.
std::vector<std::uint32_t> step_channel(const Adjacency& graph,
                                        std::span<const std::uint32_t> previous,
                                        std::span<const ScentRole> roles, std::uint32_t cap);

/// Exact multi-source breadth-first hop distances; `cap` for unreachable.
std::vector<std::uint32_t> distance_oracle(const Adjacency& graph,
                                           std::span<const ModuleId> emitters,
                                           std::uint32_t cap);

/// Fixed point of step_channel for the current roles, computed directly.
/// Inert modules keep `previous` and act as sources at that value.
std::vector<std::uint32_t> settle_channel(const Adjacency& graph,
                                          std::span<const std::uint32_t> previous,
                                          std::span<const ScentRole> roles, std::uint32_t cap);

/// Flags modules with at least one free face-neighbor cell (no module, no
/// object, not below ground).
std::vector<bool> surface_mask(std::span<const CellCoord> cells, const OccupancyMap& occupancy,
                               const Terrain& terrain);

}  // namespace morph

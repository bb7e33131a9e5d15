#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "morph/lattice.hpp"
#include "morph/scent.hpp"

namespace morph {

enum class Mode : std::uint8_t {
  Sleep,
  Search,
  Seed,
  Final,
  Node,
  INode,
  Fixed,
  Root,
  IRoot,
  ARoot,
  Disband,
  Touch,
  TouchSeed,
};

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view name);

/// Roots that count toward their region's load.
constexpr bool is_active_root(Mode m) { return m == Mode::Root || m == Mode::ARoot; }
constexpr bool is_root(Mode m) { return m == Mode::Root || m == Mode::IRoot || m == Mode::ARoot; }
constexpr bool is_board(Mode m) { return m == Mode::Fixed || is_root(m); }

/// Per-module finite memory. Fields not used by the active behavior stay at
/// their defaults.
struct Memory {
  std::optional<std::uint8_t> growth;  // face slot
  int spawned = 0;                      // seeds created by a node
  std::uint16_t used_directions = 0;    // bit per face slot
  std::optional<std::uint8_t> target;   // node's pending spawn slot
  int region = -1;                      // board region of a root
  bool contact = false;                 // touching the grasp object

  friend bool operator==(const Memory&, const Memory&) = default;
};

struct ModuleRecord {
  ModuleId id = 0;
  CellCoord cell;
  Mode mode = Mode::Sleep;
  ScentValues scent{kDefaultScentCap, kDefaultScentCap};
  std::array<ScentRole, kMaxChannels> roles{ScentRole::Inert, ScentRole::Inert};
  Memory memory;
};

}  // namespace morph

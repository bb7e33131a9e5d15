#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "morph/lattice.hpp"
#include "morph/module.hpp"
#include "morph/rng.hpp"
#include "morph/scent.hpp"

namespace morph {

enum class BehaviorKind : std::uint8_t { Chain, Branch, Adaptive, Grasp };

std::string_view to_string(BehaviorKind k);
std::optional<BehaviorKind> parse_behavior(std::string_view name);

struct BehaviorParams {
  int node_threshold = 12;  // T: node-scent hops before a FINAL turns NODE
  int branch_count = 6;     // B: seeds a node spawns before going inactive
  double p_max = 0.05;
  double p_min = 0.05;
  double f_max = 2.0;
  double f_min = 1.0;
  Vec3 bias{0.0, 0.0, 1.0};
  double seed_wake_probability = 0.0;

  friend bool operator==(const BehaviorParams&, const BehaviorParams&) = default;
};

struct NeighborInfo {
  ModuleId id = 0;
  Mode mode = Mode::Sleep;
  ScentValues scent{};
  bool surface = true;
};

/// A legal roll plus what the mover would sense after it: the minimum scent
/// per channel among the occupied face-neighbors of the destination.
struct MoveOption {
  MoveCandidate move;
  ScentValues dst_min{};
};

/// Everything one module may consult during its step: itself, its twelve
/// face-neighbor cells, its legal rolls and its sensors.
struct LocalView {
  ModuleId id = 0;
  CellCoord cell;
  Mode mode = Mode::Sleep;
  Memory memory;
  ScentValues scent{};
  std::uint32_t cap = kDefaultScentCap;
  std::array<std::optional<NeighborInfo>, kFaceCount> neighbors{};
  std::array<bool, kFaceCount> free{};  // empty, not an object, not below ground
  std::vector<MoveOption> moves;
  double region_load = 0.0;  // roots only
  bool touches_ground = false;
  bool touches_object = false;

  bool scent_detected(Channel c) const;
};

struct NeighborWrite {
  std::size_t slot = 0;
  Mode mode = Mode::Sleep;
  std::optional<std::uint8_t> growth;
};

struct Action {
  std::optional<MoveCandidate> move;
  std::optional<Mode> mode;
  std::optional<Memory> memory;
  std::vector<NeighborWrite> writes;
};

/// Scent channels a behavior keeps alive.
std::size_t channel_count(BehaviorKind kind);

ScentRole scent_role(BehaviorKind kind, Mode mode, Channel channel);

/// Modes a behavior may legally use.
bool mode_allowed(BehaviorKind kind, Mode mode);

/// Follow the channel's gradient: prefer rolls whose destination touches the
/// lowest value; fall back to a uniform random roll when nothing beats the
/// module's own value.
std::optional<MoveCandidate> gradient_move(const LocalView& view, Channel channel, Rng& rng);

std::optional<MoveCandidate> random_move(const LocalView& view, Rng& rng);

Action chain_step(const LocalView& view, const BehaviorParams& params, Rng& rng);
Action branch_step(const LocalView& view, const BehaviorParams& params, Rng& rng);
Action adaptive_step(const LocalView& view, const BehaviorParams& params, Rng& rng);
Action grasp_step(const LocalView& view, const BehaviorParams& params, Rng& rng);

Action behavior_step(BehaviorKind kind, const LocalView& view, const BehaviorParams& params,
                     Rng& rng);

}  // namespace morph

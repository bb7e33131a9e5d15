#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "morph/behaviors.hpp"
#include "morph/lattice.hpp"
#include "morph/module.hpp"
#include "morph/rng.hpp"
#include "morph/scent.hpp"

namespace morph {

/// Half-open rectangle [i0, i1) x [j0, j1) in board coordinates.
struct BoardRect {
  int i0 = 0;
  int j0 = 0;
  int i1 = 0;
  int j1 = 0;

  bool contains(int i, int j) const { return i >= i0 && i < i1 && j >= j0 && j < j1; }
  friend bool operator==(const BoardRect&, const BoardRect&) = default;
};

/// A flat square table top. Board coordinate (i, j) lives at lattice cell
/// (i + j, i - j, height); in-layer neighbors are the four (i +- 1, j) and
/// (i, j +- 1).
struct Board {
  int height = 4;
  int size_i = 30;
  int size_j = 30;
  int root_spacing = 3;
  int root_offset = 1;

  CellCoord cell(int i, int j) const { return {i + j, i - j, height}; }
  /// Cell of the layer directly underneath, touching board (i..i+1, j..j+1).
  CellCoord below(int i, int j) const { return {i + j + 1, i - j, height - 1}; }
  std::optional<std::pair<int, int>> coords(CellCoord c) const;
  bool is_root_site(int i, int j) const;

  friend bool operator==(const Board&, const Board&) = default;
};

struct Region {
  int id = 0;
  BoardRect rect;
  double weight = 0.0;
};

struct SimFlags {
  bool connectivity = true;
  bool surface_scent = false;
  bool instantaneous_scent = false;

  friend bool operator==(const SimFlags&, const SimFlags&) = default;
};

struct World {
  BehaviorKind behavior = BehaviorKind::Chain;
  BehaviorParams params;
  std::vector<ModuleRecord> modules;  // index == id
  OccupancyMap occupancy;
  CellSet objects;
  bool ground_enabled = false;
  std::optional<Board> board;
  std::vector<Region> regions;
  std::vector<ModuleId> roots;
  std::optional<double> conserved_total;
  std::uint32_t scent_cap = kDefaultScentCap;
  SimFlags flags;
  std::int64_t tick = 0;
  std::uint64_t rng_seed = 0;

  Terrain terrain() const { return {&objects, ground_enabled}; }
  const Region* region(int id) const;
  Region* region(int id);
  const ModuleRecord& module(ModuleId id) const;
};

class WorldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CommandError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws WorldError if occupancy, object or connectivity invariants fail.
void check_invariants(const World& world);

/// Rebuilds occupancy from module cells and resets scent roles.
void index_world(World& world);

// ---------------------------------------------------------------------------
// Commands

struct SetRegionWeight {
  int region = 0;
  double weight = 0.0;
  friend bool operator==(const SetRegionWeight&, const SetRegionWeight&) = default;
};
struct TranslateObject {
  Offset offset;
  friend bool operator==(const TranslateObject&, const TranslateObject&) = default;
};
struct SetParam {
  std::string name;
  double value = 0.0;
  friend bool operator==(const SetParam&, const SetParam&) = default;
};
struct Pause {
  friend bool operator==(const Pause&, const Pause&) = default;
};
struct Resume {
  friend bool operator==(const Resume&, const Resume&) = default;
};
struct Step {
  int count = 1;
  friend bool operator==(const Step&, const Step&) = default;
};

/// Commands that change simulated state. They are applied at a tick boundary.
using WorldCommand = std::variant<SetRegionWeight, TranslateObject, SetParam>;
using Command = std::variant<SetRegionWeight, TranslateObject, SetParam, Pause, Resume, Step>;

struct ScheduledCommand {
  std::int64_t tick = 0;
  WorldCommand command;
  friend bool operator==(const ScheduledCommand&, const ScheduledCommand&) = default;
};

/// Throws CommandError when `cmd` cannot be applied to `world`.
void validate_command(const World& world, const WorldCommand& cmd);
void apply_command(World& world, const WorldCommand& cmd);
/// Applies a numeric parameter by name; returns false for unknown names.
bool set_param(BehaviorParams& params, std::string_view name, double value);

// ---------------------------------------------------------------------------
// Tick reports

enum class Denial : std::uint8_t {
  DestinationOccupied,
  PivotVacated,
  TransitBlocked,
  WouldDisconnect,
  GroundViolation,
};

std::string_view to_string(Denial d);

struct AppliedMove {
  ModuleId id = 0;
  MoveCandidate move;
};

struct DeniedMove {
  ModuleId id = 0;
  MoveCandidate move;
  Denial reason = Denial::DestinationOccupied;
};

struct ModeTransition {
  ModuleId id = 0;
  Mode from = Mode::Sleep;
  Mode to = Mode::Sleep;
  ModuleId by = 0;  // module whose step caused it
  ScentValues scent{};
};

struct TickReport {
  std::int64_t tick = 0;
  std::vector<WorldCommand> commands;
  std::vector<AppliedMove> applied;
  std::vector<DeniedMove> denied;
  std::vector<ModeTransition> transitions;
  std::vector<ModuleId> behavior_order;
};

// ---------------------------------------------------------------------------
// Queries

/// nullopt if the roll is legal right now, otherwise the first failing rule.
std::optional<Denial> validate_move(const World& world, ModuleId id, const MoveCandidate& move);

/// True iff removing the module disconnects the module graph.
bool is_articulation(const World& world, ModuleId id);

/// Region weight divided by the number of active roots in it.
double region_load(const World& world, int region_id);

/// What module `id` would see if it stepped now. `surface` may be empty.
LocalView make_view(const World& world, ModuleId id, const std::vector<bool>& surface = {});

// ---------------------------------------------------------------------------

struct Ack {
  std::int64_t target_tick = 0;
};

/// A world plus its generator, command queue and run control.
class Simulation {
 public:
  Simulation(World world, Rng rng, std::vector<ScheduledCommand> schedule = {});

  /// Runs one tick: commands, scents, behaviors, move application.
  TickReport tick();

  /// Validates and queues a command for the next tick boundary.
  Ack enqueue(const Command& cmd);

  bool paused() const { return paused_; }
  /// True when the run loop may advance (running, or paused with steps owed).
  bool can_advance() const { return !paused_ || pending_steps_ > 0; }
  /// tick() that also consumes an owed step when paused.
  TickReport advance();

  const World& world() const { return world_; }
  const std::vector<ScheduledCommand>& schedule() const { return schedule_; }

 private:
  void apply_pending(TickReport& report);
  void update_scents();
  void run_behaviors(TickReport& report, std::vector<std::optional<MoveCandidate>>& requests);
  void apply_moves(TickReport& report, std::vector<std::optional<MoveCandidate>>& requests);
  void reset_emitters();

  World world_;
  Rng rng_;
  std::vector<ScheduledCommand> schedule_;
  std::size_t schedule_pos_ = 0;
  std::deque<WorldCommand> queue_;
  bool paused_ = false;
  int pending_steps_ = 0;
};

// ---------------------------------------------------------------------------
// Snapshots

struct ModuleState {
  ModuleId id = 0;
  CellCoord cell;
  Mode mode = Mode::Sleep;
  std::vector<std::uint32_t> scent;
  friend bool operator==(const ModuleState&, const ModuleState&) = default;
};

struct RegionState {
  int id = 0;
  double weight = 0.0;
  friend bool operator==(const RegionState&, const RegionState&) = default;
};

/// Between-tick copy of everything an observer may read.
struct Snapshot {
  std::int64_t tick = 0;
  BehaviorKind behavior = BehaviorKind::Chain;
  std::vector<ModuleState> modules;
  std::vector<CellCoord> objects;  // sorted
  std::vector<RegionState> regions;
  BehaviorParams params;
  bool paused = false;
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

Snapshot snapshot_of(const World& world, bool paused = false);

}  // namespace morph

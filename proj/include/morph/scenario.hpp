#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "morph/engine.hpp"
#include "morph/wire.hpp"

namespace morph {

inline constexpr int kScenarioSchemaVersion = 1;

struct ModuleSpec {
  CellCoord cell;
  Mode mode = Mode::Sleep;
  std::optional<std::uint8_t> growth;  // face slot
  friend bool operator==(const ModuleSpec&, const ModuleSpec&) = default;
};

/// A random connected blob grown from `origin` by uniform frontier attachment.
struct BlobSpec {
  int size = 0;
  CellCoord origin;
  Mode fill = Mode::Sleep;
  std::vector<std::pair<int, Mode>> marked;  // blob index -> mode
  friend bool operator==(const BlobSpec&, const BlobSpec&) = default;
};

struct BoardSpec {
  Board board;
  std::optional<BoardRect> reservoir;  // SLEEP modules hung under these board cells
  friend bool operator==(const BoardSpec&, const BoardSpec&) = default;
};

struct RegionSpec {
  int id = 0;
  BoardRect rect;
  double weight = 0.0;
  friend bool operator==(const RegionSpec&, const RegionSpec&) = default;
};

struct WeightChange {
  std::int64_t tick = 0;
  int region = 0;
  double weight = 0.0;
  friend bool operator==(const WeightChange&, const WeightChange&) = default;
};

struct ScenarioFlags {
  bool connectivity = true;
  bool surface_scent = false;
  bool instantaneous_scent = false;
  bool ground = false;
  bool conserve_weight = false;
  friend bool operator==(const ScenarioFlags&, const ScenarioFlags&) = default;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  BehaviorKind behavior = BehaviorKind::Chain;
  BehaviorParams params;
  std::vector<ModuleSpec> modules;
  std::optional<BlobSpec> blob;
  std::optional<BoardSpec> board;
  std::vector<RegionSpec> regions;
  std::vector<CellCoord> objects;
  std::vector<WeightChange> weight_schedule;
  std::uint64_t rng_seed = 1;
  std::int64_t ticks = 1000;
  int snapshot_every = 10;
  std::uint32_t scent_cap = kDefaultScentCap;
  ScenarioFlags flags;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct ParsedScenario {
  Scenario scenario;
  std::vector<std::string> warnings;
};

/// Decodes and validates a scenario document. Throws ScenarioError listing
/// every violation found; JSON syntax errors carry line and column.
ParsedScenario parse_scenario(std::string_view text);

Json scenario_to_json(const Scenario& s);
/// Field decoding only; no semantic checks.
Scenario scenario_from_json(const Json& j);
std::string serialize_scenario(const Scenario& s);

/// Regions in effect: the explicit list, or the two board halves.
std::vector<RegionSpec> effective_regions(const Scenario& s);

/// Expands blob, board and explicit modules into a validated world.
/// `gen` drives the blob generator. Throws ScenarioError.
World build_world(const Scenario& s, Rng& gen);

std::vector<ScheduledCommand> scheduled_commands(const Scenario& s);

/// The run generator for `seed`, with the initial world built from a child
/// stream of it.
Simulation make_simulation(const Scenario& s, std::uint64_t seed,
                           std::vector<ScheduledCommand> extra = {});

}  // namespace morph

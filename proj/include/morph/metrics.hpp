#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "morph/engine.hpp"
#include "morph/scenario.hpp"

namespace morph {

/// Connected, max degree 2, exactly two ends (or a single module).
bool is_single_chain(const Snapshot& s);

struct LegCount {
  int total = 0;
  std::map<int, int> per_region;
};

/// Components of grown FINAL/SEED modules that touch an active root and
/// reach the ground. A leg belongs to the region of its lowest-id root.
LegCount count_legs(const Snapshot& s, const Board& board, std::span<const RegionSpec> regions);

/// First t >= from_tick starting `window` ticks without moves or mode
/// changes, or nullopt.
std::optional<std::int64_t> stabilization_time(std::span<const TickReport> ticks,
                                               std::int64_t from_tick, int window = 25);

/// Root activations plus deactivations over ticks [from, to).
int root_switches(std::span<const TickReport> ticks, std::int64_t from, std::int64_t to);

struct Contacts {
  int modules = 0;
  int faces = 0;
  friend bool operator==(const Contacts&, const Contacts&) = default;
};

Contacts grasp_contacts(const Snapshot& s);

/// Tick of the last applied region-weight change, if any.
std::optional<std::int64_t> last_weight_change(std::span<const TickReport> ticks);

/// key=value summary lines, in a fixed order per behavior.
std::vector<std::pair<std::string, std::string>> summarize(const Scenario& scenario,
                                                           std::span<const TickReport> ticks,
                                                           const Snapshot& final_state);

}  // namespace morph

#include "morph/metrics.hpp"

#include <algorithm>
#include <sstream>
#include <variant>

#include "morph/graph.hpp"

namespace morph {

namespace {

struct SnapshotGraph {
  std::vector<CellCoord> cells;
  OccupancyMap occupancy;
  Adjacency adj;
};

SnapshotGraph graph_of(const Snapshot& s) {
  SnapshotGraph g;
  for (std::size_t i = 0; i < s.modules.size(); ++i) {
    g.cells.push_back(s.modules[i].cell);
    g.occupancy.emplace(s.modules[i].cell, static_cast<ModuleId>(i));
  }
  g.adj = build_adjacency(g.cells, g.occupancy);
  return g;
}

bool leg_mode(Mode m) { return m == Mode::Final || m == Mode::Seed; }

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

bool is_single_chain(const Snapshot& s) {
  const auto n = s.modules.size();
  if (n == 0) return false;
  if (n == 1) return true;
  const auto g = graph_of(s);
  if (!is_connected(g.adj)) return false;
  std::size_t ends = 0;
  for (const auto& nbrs : g.adj) {
    if (nbrs.size() > 2) return false;
    if (nbrs.size() == 1) ++ends;
  }
  return ends == 2;
}

LegCount count_legs(const Snapshot& s, const Board& board, std::span<const RegionSpec> regions) {
  LegCount out;
  const auto g = graph_of(s);
  const auto n = s.modules.size();
  std::vector<bool> seen(n, false);
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start] || !leg_mode(s.modules[start].mode)) continue;
    bool grounded = false;
    std::optional<std::size_t> root;
    std::vector<ModuleId> stack{static_cast<ModuleId>(start)};
    seen[start] = true;
    while (!stack.empty()) {
      const auto v = static_cast<std::size_t>(stack.back());
      stack.pop_back();
      grounded = grounded || s.modules[v].cell.z == 0;
      for (const auto w : g.adj[v]) {
        const auto wi = static_cast<std::size_t>(w);
        const auto& m = s.modules[wi];
        if (is_active_root(m.mode) && (!root || wi < *root)) root = wi;
        if (seen[wi] || !leg_mode(m.mode)) continue;
        seen[wi] = true;
        stack.push_back(w);
      }
    }
    if (!grounded || !root) continue;
    ++out.total;
    if (auto ij = board.coords(s.modules[*root].cell)) {
      for (const auto& r : regions) {
        if (r.rect.contains(ij->first, ij->second)) {
          ++out.per_region[r.id];
          break;
        }
      }
    }
  }
  return out;
}

std::optional<std::int64_t> stabilization_time(std::span<const TickReport> ticks,
                                               std::int64_t from_tick, int window) {
  std::int64_t run_start = from_tick;
  int run = 0;
  for (const auto& r : ticks) {
    if (r.tick < from_tick) continue;
    if (r.applied.empty() && r.transitions.empty()) {
      if (run == 0) run_start = r.tick;
      if (++run >= window) return run_start;
    } else {
      run = 0;
    }
  }
  return std::nullopt;
}

int root_switches(std::span<const TickReport> ticks, std::int64_t from, std::int64_t to) {
  int count = 0;
  for (const auto& r : ticks) {
    if (r.tick < from || r.tick >= to) continue;
    for (const auto& t : r.transitions) {
      if (is_root(t.from) && is_root(t.to) && is_active_root(t.from) != is_active_root(t.to)) {
        ++count;
      }
    }
  }
  return count;
}

Contacts grasp_contacts(const Snapshot& s) {
  const CellSet objects(s.objects.begin(), s.objects.end());
  Contacts c;
  for (const auto& m : s.modules) {
    if (m.mode != Mode::Touch && m.mode != Mode::TouchSeed) continue;
    int faces = 0;
    for (const auto& n : neighbors(m.cell)) faces += objects.contains(n) ? 1 : 0;
    if (faces > 0) {
      ++c.modules;
      c.faces += faces;
    }
  }
  return c;
}

std::optional<std::int64_t> last_weight_change(std::span<const TickReport> ticks) {
  std::optional<std::int64_t> last;
  for (const auto& r : ticks) {
    for (const auto& c : r.commands) {
      if (std::holds_alternative<SetRegionWeight>(c)) last = r.tick;
    }
  }
  return last;
}

std::vector<std::pair<std::string, std::string>> summarize(const Scenario& scenario,
                                                           std::span<const TickReport> ticks,
                                                           const Snapshot& final_state) {
  std::vector<std::pair<std::string, std::string>> out;
  auto put = [&](std::string key, auto value) {
    if constexpr (std::is_same_v<decltype(value), bool>) {
      out.emplace_back(std::move(key), value ? "true" : "false");
    } else if constexpr (std::is_arithmetic_v<decltype(value)>) {
      out.emplace_back(std::move(key), std::to_string(value));
    } else {
      out.emplace_back(std::move(key), std::string(value));
    }
  };
  std::size_t applied = 0;
  std::size_t denied = 0;
  std::size_t transitions = 0;
  for (const auto& r : ticks) {
    applied += r.applied.size();
    denied += r.denied.size();
    transitions += r.transitions.size();
  }
  put("behavior", to_string(scenario.behavior));
  put("tick", final_state.tick);
  put("modules", final_state.modules.size());
  put("applied_moves", applied);
  put("denied_moves", denied);
  put("transitions", transitions);
  switch (scenario.behavior) {
    case BehaviorKind::Chain:
    case BehaviorKind::Branch: {
      put("single_chain", is_single_chain(final_state));
      std::map<Mode, int> modes;
      for (const auto& m : final_state.modules) ++modes[m.mode];
      for (const auto& [mode, count] : modes) put("mode_" + std::string(to_string(mode)), count);
      break;
    }
    case BehaviorKind::Adaptive: {
      if (scenario.board) {
        const auto regions = effective_regions(scenario);
        const auto legs = count_legs(final_state, scenario.board->board, regions);
        put("legs", legs.total);
        for (const auto& r : regions) {
          const auto it = legs.per_region.find(r.id);
          put("legs_region_" + std::to_string(r.id), it == legs.per_region.end() ? 0 : it->second);
        }
      }
      for (const auto& r : final_state.regions) put("weight_region_" + std::to_string(r.id), fmt(r.weight));
      const auto from = last_weight_change(ticks).value_or(0);
      put("stabilization_from", from);
      const auto t = stabilization_time(ticks, from);
      put("stabilization_tick", t ? std::to_string(*t) : std::string("none"));
      put("stabilization_time", t ? std::to_string(*t - from) : std::string("none"));
      break;
    }
    case BehaviorKind::Grasp: {
      const auto c = grasp_contacts(final_state);
      put("touch_modules", c.modules);
      put("touched_faces", c.faces);
      break;
    }
  }
  return out;
}

}  // namespace morph

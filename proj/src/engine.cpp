#include "morph/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "morph/graph.hpp"

namespace morph {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool occupied(const World& w, CellCoord c) { return w.occupancy.contains(c); }

/// Sufficient test that removing the module at `cell` keeps the graph
/// connected: its occupied neighbors are connected among themselves.
bool neighbor_ring_connected(const OccupancyMap& occupancy, CellCoord cell) {
  std::array<bool, kFaceCount> present{};
  std::size_t count = 0;
  std::size_t first = kFaceCount;
  for (std::size_t s = 0; s < kFaceCount; ++s) {
    present[s] = occupancy.contains(cell + kFaceOffsets[s]);
    if (present[s]) {
      ++count;
      if (first == kFaceCount) first = s;
    }
  }
  if (count <= 1) return true;
  std::array<bool, kFaceCount> seen{};
  std::array<std::size_t, kFaceCount> stack{};
  std::size_t top = 0;
  stack[top++] = first;
  seen[first] = true;
  std::size_t reached = 1;
  while (top > 0) {
    const auto s = stack[--top];
    for (auto t : adjacent_faces(s)) {
      if (present[t] && !seen[t]) {
        seen[t] = true;
        ++reached;
        stack[top++] = t;
      }
    }
  }
  return reached == count;
}

/// Exact check: is the module graph connected once `move` is carried out?
bool connected_after_move(const World& world, const MoveCandidate& move) {
  const auto n = world.modules.size();
  std::vector<bool> seen(n, false);
  auto id_at = [&](CellCoord c) -> std::optional<ModuleId> {
    if (c == move.dst) return world.occupancy.at(move.src);
    if (c == move.src) return std::nullopt;
    if (auto it = world.occupancy.find(c); it != world.occupancy.end()) return it->second;
    return std::nullopt;
  };
  auto cell_of = [&](ModuleId id) {
    const auto& c = world.modules[static_cast<std::size_t>(id)].cell;
    return c == move.src ? move.dst : c;
  };
  std::vector<ModuleId> stack{world.occupancy.at(move.pivot)};
  seen[static_cast<std::size_t>(stack.back())] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (const auto& c : neighbors(cell_of(v))) {
      const auto w = id_at(c);
      if (!w || seen[static_cast<std::size_t>(*w)]) continue;
      seen[static_cast<std::size_t>(*w)] = true;
      ++reached;
      stack.push_back(*w);
    }
  }
  return reached == n;
}

std::optional<Denial> check_geometry(const World& world, const MoveCandidate& move) {
  if (!occupied(world, move.pivot)) return Denial::PivotVacated;
  if (occupied(world, move.dst) || world.objects.contains(move.dst)) {
    return Denial::DestinationOccupied;
  }
  if (world.ground_enabled && move.dst.z < 0) return Denial::GroundViolation;
  const auto corner = transit_corner(move);
  if (occupied(world, corner) || world.objects.contains(corner)) return Denial::TransitBlocked;
  return std::nullopt;
}

void redistribute(World& world, int region_id, double weight) {
  Region* target = world.region(region_id);
  if (!world.conserved_total) {
    target->weight = weight;
    return;
  }
  const double rest = *world.conserved_total - weight;
  double others = 0.0;
  std::size_t count = 0;
  for (const auto& r : world.regions) {
    if (r.id == region_id) continue;
    others += r.weight;
    ++count;
  }
  target->weight = weight;
  for (auto& r : world.regions) {
    if (r.id == region_id) continue;
    r.weight = others > 0.0 ? rest * (r.weight / others) : rest / static_cast<double>(count);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<std::pair<int, int>> Board::coords(CellCoord c) const {
  if (c.z != height || ((c.x + c.y) & 1) != 0) return std::nullopt;
  const int i = (c.x + c.y) / 2;
  const int j = (c.x - c.y) / 2;
  if (i < 0 || i >= size_i || j < 0 || j >= size_j) return std::nullopt;
  return std::pair{i, j};
}

bool Board::is_root_site(int i, int j) const {
  return root_spacing > 0 && i % root_spacing == root_offset && j % root_spacing == root_offset;
}

const Region* World::region(int id) const {
  for (const auto& r : regions) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

Region* World::region(int id) {
  for (auto& r : regions) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

const ModuleRecord& World::module(ModuleId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= modules.size()) {
    throw WorldError("unknown module id " + std::to_string(id));
  }
  return modules[static_cast<std::size_t>(id)];
}

void index_world(World& world) {
  world.occupancy.clear();
  world.occupancy.reserve(world.modules.size() * 2);
  world.roots.clear();
  for (std::size_t i = 0; i < world.modules.size(); ++i) {
    auto& m = world.modules[i];
    m.id = static_cast<ModuleId>(i);
    world.occupancy.emplace(m.cell, m.id);
    if (is_root(m.mode)) world.roots.push_back(m.id);
    for (std::size_t c = 0; c < kMaxChannels; ++c) {
      m.roles[c] = scent_role(world.behavior, m.mode, static_cast<Channel>(c));
      m.scent[c] = std::min(m.scent[c], world.scent_cap);
      if (m.roles[c] == ScentRole::Emit) m.scent[c] = 0;
    }
  }
}

void check_invariants(const World& world) {
  if (world.occupancy.size() != world.modules.size()) {
    throw WorldError("occupancy does not match module table");
  }
  std::vector<CellCoord> cells;
  cells.reserve(world.modules.size());
  for (std::size_t i = 0; i < world.modules.size(); ++i) {
    const auto& m = world.modules[i];
    if (m.id != static_cast<ModuleId>(i)) throw WorldError("module ids are not dense");
    if (!has_lattice_parity(m.cell)) throw WorldError("module off lattice");
    auto it = world.occupancy.find(m.cell);
    if (it == world.occupancy.end() || it->second != m.id) {
      throw WorldError("occupancy does not match module table");
    }
    if (world.objects.contains(m.cell)) throw WorldError("module overlaps object");
    if (world.ground_enabled && m.cell.z < 0) throw WorldError("module below ground");
    cells.push_back(m.cell);
  }
  if (world.flags.connectivity && !is_connected(build_adjacency(cells, world.occupancy))) {
    throw WorldError("module graph is disconnected");
  }
}

// ---------------------------------------------------------------------------

bool set_param(BehaviorParams& params, std::string_view name, double value) {
  if (name == "T") {
    params.node_threshold = static_cast<int>(value);
  } else if (name == "B") {
    params.branch_count = static_cast<int>(value);
  } else if (name == "p_max") {
    params.p_max = value;
  } else if (name == "p_min") {
    params.p_min = value;
  } else if (name == "F_max") {
    params.f_max = value;
  } else if (name == "F_min") {
    params.f_min = value;
  } else if (name == "seed_wake_probability") {
    params.seed_wake_probability = value;
  } else if (name == "bias_x") {
    params.bias.x = value;
  } else if (name == "bias_y") {
    params.bias.y = value;
  } else if (name == "bias_z") {
    params.bias.z = value;
  } else {
    return false;
  }
  return true;
}

void validate_command(const World& world, const WorldCommand& cmd) {
  std::visit(
      Overloaded{
          [&](const SetRegionWeight& c) {
            if (world.region(c.region) == nullptr) {
              throw CommandError("unknown region " + std::to_string(c.region));
            }
            if (!std::isfinite(c.weight) || c.weight < 0.0) {
              throw CommandError("weight must be a nonnegative number");
            }
            if (world.conserved_total && c.weight > *world.conserved_total + 1e-9) {
              throw CommandError("weight exceeds the conserved total");
            }
          },
          [&](const TranslateObject& c) {
            if (world.objects.empty()) throw CommandError("no object to move");
            if (!has_lattice_parity(c.offset)) {
              throw CommandError("offset must keep the object on the lattice");
            }
            for (const auto& cell : world.objects) {
              const auto moved = cell + c.offset;
              if (occupied(world, moved)) throw CommandError("object would overlap modules");
              if (world.ground_enabled && moved.z < 0) {
                throw CommandError("object would go below ground");
              }
            }
          },
          [&](const SetParam& c) {
            BehaviorParams p = world.params;
            if (!set_param(p, c.name, c.value)) throw CommandError("unknown param " + c.name);
            if (!std::isfinite(c.value)) throw CommandError("param value must be finite");
            auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
            if (!prob(p.p_max) || !prob(p.p_min) || !prob(p.seed_wake_probability)) {
              throw CommandError("probabilities must lie in [0, 1]");
            }
            if (p.f_min > p.f_max) throw CommandError("F_min must not exceed F_max");
            if (p.node_threshold < 0 || p.branch_count < 0) {
              throw CommandError("T and B must be nonnegative");
            }
          },
      },
      cmd);
}

void apply_command(World& world, const WorldCommand& cmd) {
  std::visit(Overloaded{
                 [&](const SetRegionWeight& c) { redistribute(world, c.region, c.weight); },
                 [&](const TranslateObject& c) {
                   CellSet moved;
                   for (const auto& cell : world.objects) moved.insert(cell + c.offset);
                   world.objects = std::move(moved);
                 },
                 [&](const SetParam& c) { set_param(world.params, c.name, c.value); },
             },
             cmd);
}

std::string_view to_string(Denial d) {
  switch (d) {
    case Denial::DestinationOccupied: return "destination-occupied";
    case Denial::PivotVacated: return "pivot-vacated";
    case Denial::TransitBlocked: return "transit-blocked";
    case Denial::WouldDisconnect: return "would-disconnect";
    case Denial::GroundViolation: return "ground-violation";
  }
  return "?";
}

// ---------------------------------------------------------------------------

std::optional<Denial> validate_move(const World& world, ModuleId id, const MoveCandidate& move) {
  const auto& m = world.module(id);
  if (m.cell != move.src) throw WorldError("move source is not the module's cell");
  if (auto d = check_geometry(world, move)) return d;
  if (world.flags.connectivity && !neighbor_ring_connected(world.occupancy, move.src) &&
      !connected_after_move(world, move)) {
    return Denial::WouldDisconnect;
  }
  return std::nullopt;
}

bool is_articulation(const World& world, ModuleId id) {
  const auto& m = world.module(id);
  std::vector<CellCoord> cells;
  cells.reserve(world.modules.size());
  for (const auto& r : world.modules) cells.push_back(r.cell);
  std::vector<bool> removed(world.modules.size(), false);
  removed[static_cast<std::size_t>(m.id)] = true;
  return !is_connected(build_adjacency(cells, world.occupancy), removed);
}

double region_load(const World& world, int region_id) {
  const Region* r = world.region(region_id);
  if (r == nullptr) throw WorldError("unknown region " + std::to_string(region_id));
  if (r->weight <= 0.0) return 0.0;
  int active = 0;
  for (auto id : world.roots) {
    const auto& m = world.modules[static_cast<std::size_t>(id)];
    if (m.memory.region == region_id && is_active_root(m.mode)) ++active;
  }
  if (active == 0) return std::numeric_limits<double>::infinity();
  return r->weight / active;
}

LocalView make_view(const World& world, ModuleId id, const std::vector<bool>& surface) {
  const auto& m = world.module(id);
  const Terrain terrain = world.terrain();
  LocalView v;
  v.id = id;
  v.cell = m.cell;
  v.mode = m.mode;
  v.memory = m.memory;
  v.scent = m.scent;
  v.cap = world.scent_cap;
  for (std::size_t s = 0; s < kFaceCount; ++s) {
    const CellCoord c = m.cell + kFaceOffsets[s];
    if (auto it = world.occupancy.find(c); it != world.occupancy.end()) {
      const auto& n = world.modules[static_cast<std::size_t>(it->second)];
      v.neighbors[s] = NeighborInfo{n.id, n.mode, n.scent,
                                    surface.empty() || surface[static_cast<std::size_t>(n.id)]};
    } else {
      const bool object = terrain.is_object(c);
      v.touches_object = v.touches_object || object;
      v.free[s] = !object && !terrain.below_ground(c);
    }
  }
  v.memory.contact = v.touches_object;
  v.touches_ground = world.ground_enabled && m.cell.z == 0;
  if (is_root(m.mode) && world.region(m.memory.region) != nullptr) {
    v.region_load = region_load(world, m.memory.region);
  }
  if (m.mode == Mode::Search) {
    const auto moves = enumerate_moves([&](CellCoord c) { return occupied(world, c); }, m.cell,
                                       terrain);
    v.moves.reserve(moves.size());
    for (const auto& mv : moves) {
      MoveOption opt{mv, {world.scent_cap, world.scent_cap}};
      for (const auto& c : neighbors(mv.dst)) {
        if (c == mv.src) continue;
        auto it = world.occupancy.find(c);
        if (it == world.occupancy.end()) continue;
        if (!surface.empty() && !surface[static_cast<std::size_t>(it->second)]) continue;
        const auto& n = world.modules[static_cast<std::size_t>(it->second)];
        for (std::size_t k = 0; k < kMaxChannels; ++k) {
          opt.dst_min[k] = std::min(opt.dst_min[k], n.scent[k]);
        }
      }
      v.moves.push_back(opt);
    }
  }
  return v;
}

// ---------------------------------------------------------------------------

Simulation::Simulation(World world, Rng rng, std::vector<ScheduledCommand> schedule)
    : world_(std::move(world)), rng_(std::move(rng)), schedule_(std::move(schedule)) {
  std::stable_sort(schedule_.begin(), schedule_.end(),
                   [](const auto& a, const auto& b) { return a.tick < b.tick; });
  while (schedule_pos_ < schedule_.size() && schedule_[schedule_pos_].tick < world_.tick) {
    ++schedule_pos_;
  }
  check_invariants(world_);
}

Ack Simulation::enqueue(const Command& cmd) {
  const Ack ack{world_.tick};
  std::visit(Overloaded{
                 [&](const Pause&) { paused_ = true; },
                 [&](const Resume&) { paused_ = false; },
                 [&](const Step& s) {
                   if (s.count < 1) throw CommandError("step count must be positive");
                   pending_steps_ += s.count;
                 },
                 [&](const auto& world_cmd) {
                   World projected = world_;
                   for (const auto& queued : queue_) apply_command(projected, queued);
                   validate_command(projected, world_cmd);
                   queue_.emplace_back(world_cmd);
                 },
             },
             cmd);
  return ack;
}

TickReport Simulation::advance() {
  if (paused_ && pending_steps_ > 0) --pending_steps_;
  return tick();
}

TickReport Simulation::tick() {
  if (world_.occupancy.size() != world_.modules.size()) {
    throw WorldError("occupancy does not match module table");
  }
  TickReport report;
  report.tick = world_.tick;
  apply_pending(report);
  update_scents();
  std::vector<std::optional<MoveCandidate>> requests(world_.modules.size());
  run_behaviors(report, requests);
  apply_moves(report, requests);
  reset_emitters();
  ++world_.tick;
  return report;
}

void Simulation::apply_pending(TickReport& report) {
  while (schedule_pos_ < schedule_.size() && schedule_[schedule_pos_].tick <= world_.tick) {
    const auto& cmd = schedule_[schedule_pos_++].command;
    validate_command(world_, cmd);
    apply_command(world_, cmd);
    report.commands.push_back(cmd);
  }
  while (!queue_.empty()) {
    auto cmd = std::move(queue_.front());
    queue_.pop_front();
    apply_command(world_, cmd);
    report.commands.push_back(std::move(cmd));
  }
}

void Simulation::update_scents() {
  const auto n = world_.modules.size();
  std::vector<CellCoord> cells(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& m = world_.modules[i];
    cells[i] = m.cell;
    for (std::size_t c = 0; c < kMaxChannels; ++c) {
      m.roles[c] = scent_role(world_.behavior, m.mode, static_cast<Channel>(c));
    }
  }
  const auto graph = build_adjacency(cells, world_.occupancy);
  for (std::size_t c = 0; c < channel_count(world_.behavior); ++c) {
    std::vector<std::uint32_t> prev(n);
    std::vector<ScentRole> roles(n);
    for (std::size_t i = 0; i < n; ++i) {
      prev[i] = world_.modules[i].scent[c];
      roles[i] = world_.modules[i].roles[c];
    }
    const auto next = world_.flags.instantaneous_scent
                          ? settle_channel(graph, prev, roles, world_.scent_cap)
                          : step_channel(graph, prev, roles, world_.scent_cap);
    for (std::size_t i = 0; i < n; ++i) world_.modules[i].scent[c] = next[i];
  }
}

void Simulation::run_behaviors(TickReport& report,
                               std::vector<std::optional<MoveCandidate>>& requests) {
  const auto n = world_.modules.size();
  std::vector<ModuleId> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng_.shuffle(std::span<ModuleId>(order));

  std::vector<bool> surface;
  if (world_.flags.surface_scent) {
    std::vector<CellCoord> cells(n);
    for (std::size_t i = 0; i < n; ++i) cells[i] = world_.modules[i].cell;
    surface = surface_mask(cells, world_.occupancy, world_.terrain());
  }

  auto transition = [&](ModuleRecord& m, Mode to, ModuleId by) {
    if (m.mode == to) return false;
    report.transitions.push_back({m.id, m.mode, to, by, m.scent});
    m.mode = to;
    return true;
  };

  for (const auto id : order) {
    const auto view = make_view(world_, id, surface);
    Action act = behavior_step(world_.behavior, view, world_.params, rng_);
    auto& self = world_.modules[static_cast<std::size_t>(id)];
    self.memory.contact = view.memory.contact;
    if (act.memory) self.memory = *act.memory;
    for (const auto& w : act.writes) {
      const auto it = world_.occupancy.find(self.cell + kFaceOffsets.at(w.slot));
      if (it == world_.occupancy.end()) throw WorldError("neighbor write to an empty cell");
      auto& target = world_.modules[static_cast<std::size_t>(it->second)];
      if (w.growth) target.memory.growth = w.growth;
      // A request made under the old mode no longer stands.
      if (transition(target, w.mode, id)) requests[static_cast<std::size_t>(target.id)].reset();
    }
    // Logged after the writes it may depend on, e.g. the last spawn before INODE.
    if (act.mode) transition(self, *act.mode, id);
    if (act.move) requests[static_cast<std::size_t>(id)] = act.move;
  }
  report.behavior_order = std::move(order);
}

void Simulation::apply_moves(TickReport& report,
                             std::vector<std::optional<MoveCandidate>>& requests) {
  std::vector<ModuleId> order;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (requests[i]) order.push_back(static_cast<ModuleId>(i));
  }
  rng_.shuffle(std::span<ModuleId>(order));
  for (const auto id : order) {
    const auto& move = *requests[static_cast<std::size_t>(id)];
    if (auto denial = validate_move(world_, id, move)) {
      report.denied.push_back({id, move, *denial});
      continue;
    }
    world_.occupancy.erase(move.src);
    world_.occupancy.emplace(move.dst, id);
    world_.modules[static_cast<std::size_t>(id)].cell = move.dst;
    report.applied.push_back({id, move});
  }
}

void Simulation::reset_emitters() {
  for (auto& m : world_.modules) {
    for (std::size_t c = 0; c < kMaxChannels; ++c) {
      m.roles[c] = scent_role(world_.behavior, m.mode, static_cast<Channel>(c));
      if (m.roles[c] == ScentRole::Emit) m.scent[c] = 0;
    }
  }
}

// ---------------------------------------------------------------------------

Snapshot snapshot_of(const World& world, bool paused) {
  Snapshot s;
  s.tick = world.tick;
  s.behavior = world.behavior;
  s.params = world.params;
  s.paused = paused;
  const auto channels = channel_count(world.behavior);
  s.modules.reserve(world.modules.size());
  for (const auto& m : world.modules) {
    s.modules.push_back(
        {m.id, m.cell, m.mode, std::vector<std::uint32_t>(m.scent.begin(), m.scent.begin() + channels)});
  }
  s.objects.assign(world.objects.begin(), world.objects.end());
  std::sort(s.objects.begin(), s.objects.end());
  for (const auto& r : world.regions) s.regions.push_back({r.id, r.weight});
  return s;
}

}  // namespace morph

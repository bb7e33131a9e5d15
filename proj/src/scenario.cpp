#include "morph/scenario.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "morph/graph.hpp"

namespace morph {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

std::string cell_str(CellCoord c) {
  std::ostringstream os;
  os << '(' << c.x << ", " << c.y << ", " << c.z << ')';
  return os.str();
}

Json rect_to_json(const BoardRect& r) { return Json::array({r.i0, r.j0, r.i1, r.j1}); }

BoardRect rect_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw WireError("rect must be [i0, j0, i1, j1]");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

Mode mode_field(const Json& j) {
  const auto name = j.get<std::string>();
  if (auto m = parse_mode(name)) return *m;
  throw WireError("unknown mode '" + name + "'");
}

std::optional<std::uint8_t> growth_from_json(const Json& j) {
  const auto slot = face_slot(cell_from_json(j));
  if (!slot) throw WireError("growth must be a face offset");
  return static_cast<std::uint8_t>(*slot);
}

/// (line, column) of a byte offset, both 1-based.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void check_params(const Scenario& s, std::vector<std::string>& v) {
  const auto& p = s.params;
  auto prob = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
  if (!prob(p.p_max) || !prob(p.p_min) || !prob(p.seed_wake_probability)) {
    v.emplace_back("probabilities must lie in [0, 1]");
  }
  if (!(p.f_min <= p.f_max)) v.emplace_back("F_min must not exceed F_max");
  if (p.node_threshold < 0 || p.branch_count < 0) v.emplace_back("T and B must be nonnegative");
  if (s.behavior == BehaviorKind::Grasp && p.bias == Vec3{}) {
    v.emplace_back("grasp needs a nonzero bias");
  }
}

void check_regions(const Scenario& s, const std::vector<RegionSpec>& regions,
                   std::vector<std::string>& v) {
  std::set<int> ids;
  double total = 0.0;
  for (const auto& r : regions) {
    if (!ids.insert(r.id).second) v.push_back("duplicate region id " + std::to_string(r.id));
    if (!std::isfinite(r.weight) || r.weight < 0.0) {
      v.push_back("region " + std::to_string(r.id) + " has a negative weight");
    }
    total += r.weight;
  }
  std::int64_t last = std::numeric_limits<std::int64_t>::min();
  for (const auto& w : s.weight_schedule) {
    if (w.tick < last) v.emplace_back("weight schedule ticks must be nondecreasing");
    last = std::max(last, w.tick);
    if (w.tick < 0) v.emplace_back("weight schedule tick must be nonnegative");
    if (!ids.contains(w.region)) {
      v.push_back("weight schedule names unknown region " + std::to_string(w.region));
    }
    if (!std::isfinite(w.weight) || w.weight < 0.0) {
      v.emplace_back("weight schedule entry has a negative weight");
    } else if (s.flags.conserve_weight && w.weight > total + 1e-9) {
      v.emplace_back("weight schedule entry exceeds the conserved total");
    }
  }
}

/// Uniform frontier attachment: each new cell is drawn uniformly from the
/// admissible empty cells face-adjacent to the blob so far.
std::vector<CellCoord> grow_blob(const BlobSpec& blob, const CellSet& taken,
                                 const Terrain& terrain, Rng& gen) {
  std::vector<CellCoord> cells{blob.origin};
  CellSet inside{blob.origin};
  std::set<CellCoord> frontier;
  auto expand = [&](CellCoord c) {
    frontier.erase(c);
    for (const auto& n : neighbors(c)) {
      if (inside.contains(n) || taken.contains(n) || terrain.is_object(n) ||
          terrain.below_ground(n)) {
        continue;
      }
      frontier.insert(n);
    }
  };
  expand(blob.origin);
  while (static_cast<int>(cells.size()) < blob.size && !frontier.empty()) {
    auto it = frontier.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(gen.uniform_index(frontier.size())));
    const CellCoord c = *it;
    cells.push_back(c);
    inside.insert(c);
    expand(c);
  }
  return cells;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

// ---------------------------------------------------------------------------

Json scenario_to_json(const Scenario& s) {
  Json j{{"schema_version", s.schema_version},
         {"name", s.name},
         {"behavior", to_string(s.behavior)},
         {"rng_seed", s.rng_seed},
         {"ticks", s.ticks},
         {"snapshot_every", s.snapshot_every},
         {"scent_cap", s.scent_cap},
         {"flags",
          {{"connectivity", s.flags.connectivity},
           {"surface_scent", s.flags.surface_scent},
           {"instantaneous_scent", s.flags.instantaneous_scent},
           {"ground", s.flags.ground},
           {"conserve_weight", s.flags.conserve_weight}}},
         {"params", params_to_json(s.params)}};
  Json modules = Json::array();
  for (const auto& m : s.modules) {
    Json e{{"cell", cell_to_json(m.cell)}, {"mode", to_string(m.mode)}};
    if (m.growth) e["growth"] = cell_to_json(kFaceOffsets[*m.growth]);
    modules.push_back(std::move(e));
  }
  j["modules"] = std::move(modules);
  if (s.blob) {
    Json marked = Json::array();
    for (const auto& [index, mode] : s.blob->marked) {
      marked.push_back({{"index", index}, {"mode", to_string(mode)}});
    }
    j["blob"] = {{"size", s.blob->size},
                 {"origin", cell_to_json(s.blob->origin)},
                 {"fill", to_string(s.blob->fill)},
                 {"marked", std::move(marked)}};
  }
  if (s.board) {
    const auto& b = s.board->board;
    Json board{{"height", b.height},
               {"size", Json::array({b.size_i, b.size_j})},
               {"root_spacing", b.root_spacing},
               {"root_offset", b.root_offset}};
    if (s.board->reservoir) board["reservoir"] = rect_to_json(*s.board->reservoir);
    j["board"] = std::move(board);
  }
  Json regions = Json::array();
  for (const auto& r : s.regions) {
    regions.push_back({{"id", r.id}, {"rect", rect_to_json(r.rect)}, {"weight", r.weight}});
  }
  j["regions"] = std::move(regions);
  Json objects = Json::array();
  for (const auto& c : s.objects) objects.push_back(cell_to_json(c));
  j["objects"] = std::move(objects);
  Json schedule = Json::array();
  for (const auto& w : s.weight_schedule) {
    schedule.push_back({{"tick", w.tick}, {"region", w.region}, {"weight", w.weight}});
  }
  j["weight_schedule"] = std::move(schedule);
  return j;
}

Scenario scenario_from_json(const Json& j) {
  static const std::set<std::string> kKnown{
      "schema_version", "name",    "behavior", "rng_seed", "ticks",   "snapshot_every",
      "scent_cap",      "flags",   "params",   "modules",  "blob",    "board",
      "regions",        "objects", "weight_schedule"};
  if (!j.is_object()) throw WireError("scenario must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.contains(key)) throw WireError("unknown field '" + key + "'");
  }
  Scenario s;
  std::string field;
  try {
    field = "schema_version";
    s.schema_version = j.value(field, kScenarioSchemaVersion);
    field = "name";
    s.name = j.value(field, std::string{});
    field = "behavior";
    const auto behavior = j.at(field).get<std::string>();
    if (auto b = parse_behavior(behavior)) {
      s.behavior = *b;
    } else {
      throw WireError("unknown behavior '" + behavior + "'");
    }
    field = "rng_seed";
    s.rng_seed = j.value(field, s.rng_seed);
    field = "ticks";
    s.ticks = j.value(field, s.ticks);
    field = "snapshot_every";
    s.snapshot_every = j.value(field, s.snapshot_every);
    field = "scent_cap";
    s.scent_cap = j.value(field, s.scent_cap);
    field = "flags";
    if (j.contains(field)) {
      const auto& f = j.at(field);
      s.flags.connectivity = f.value("connectivity", s.flags.connectivity);
      s.flags.surface_scent = f.value("surface_scent", s.flags.surface_scent);
      s.flags.instantaneous_scent = f.value("instantaneous_scent", s.flags.instantaneous_scent);
      s.flags.ground = f.value("ground", s.flags.ground);
      s.flags.conserve_weight = f.value("conserve_weight", s.flags.conserve_weight);
    }
    field = "params";
    if (j.contains(field)) s.params = params_from_json(j.at(field));
    field = "modules";
    if (j.contains(field)) {
      for (const auto& m : j.at(field)) {
        ModuleSpec spec{cell_from_json(m.at("cell")), mode_field(m.value("mode", Json("SLEEP"))),
                        std::nullopt};
        if (m.contains("growth")) spec.growth = growth_from_json(m.at("growth"));
        s.modules.push_back(spec);
      }
    }
    field = "blob";
    if (j.contains(field)) {
      const auto& b = j.at(field);
      BlobSpec blob;
      blob.size = b.at("size").get<int>();
      blob.origin = b.contains("origin") ? cell_from_json(b.at("origin")) : CellCoord{};
      blob.fill = mode_field(b.value("fill", Json("SLEEP")));
      if (b.contains("marked")) {
        for (const auto& m : b.at("marked")) {
          blob.marked.emplace_back(m.at("index").get<int>(), mode_field(m.at("mode")));
        }
      }
      s.blob = blob;
    }
    field = "board";
    if (j.contains(field)) {
      const auto& b = j.at(field);
      BoardSpec spec;
      spec.board.height = b.value("height", spec.board.height);
      if (b.contains("size")) {
        spec.board.size_i = b.at("size").at(0).get<int>();
        spec.board.size_j = b.at("size").at(1).get<int>();
      }
      spec.board.root_spacing = b.value("root_spacing", spec.board.root_spacing);
      spec.board.root_offset = b.value("root_offset", spec.board.root_offset);
      if (b.contains("reservoir")) spec.reservoir = rect_from_json(b.at("reservoir"));
      s.board = spec;
    }
    field = "regions";
    if (j.contains(field)) {
      for (const auto& r : j.at(field)) {
        s.regions.push_back(
            {r.at("id").get<int>(), rect_from_json(r.at("rect")), r.value("weight", 0.0)});
      }
    }
    field = "objects";
    if (j.contains(field)) {
      for (const auto& c : j.at(field)) s.objects.push_back(cell_from_json(c));
    }
    field = "weight_schedule";
    if (j.contains(field)) {
      for (const auto& w : j.at(field)) {
        s.weight_schedule.push_back(
            {w.at("tick").get<std::int64_t>(), w.at("region").get<int>(), w.at("weight").get<double>()});
      }
    }
  } catch (const Json::exception& e) {
    throw WireError("field '" + field + "': " + e.what());
  } catch (const WireError& e) {
    throw WireError("field '" + field + "': " + e.what());
  }
  return s;
}

std::string serialize_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

ParsedScenario parse_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ScenarioError({"syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(col)});
  }
  ParsedScenario out;
  try {
    out.scenario = scenario_from_json(doc);
  } catch (const WireError& e) {
    throw ScenarioError({e.what()});
  }
  Rng gen = Rng(out.scenario.rng_seed).split();
  build_world(out.scenario, gen);
  if (out.scenario.behavior == BehaviorKind::Adaptive && out.scenario.params.f_min > 1.0) {
    out.warnings.emplace_back(
        "F_min > 1: an empty-region root may deactivate below the weight it must carry");
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<RegionSpec> effective_regions(const Scenario& s) {
  if (!s.regions.empty() || !s.board) return s.regions;
  const auto& b = s.board->board;
  const int half = b.size_i / 2;
  return {{1, {0, 0, half, b.size_j}, 0.0}, {2, {half, 0, b.size_i, b.size_j}, 0.0}};
}

World build_world(const Scenario& s, Rng& gen) {
  std::vector<std::string> v;
  if (s.schema_version != kScenarioSchemaVersion) {
    v.push_back("unsupported schema_version " + std::to_string(s.schema_version));
  }
  if (s.ticks < 0) v.emplace_back("ticks must be nonnegative");
  if (s.snapshot_every < 1) v.emplace_back("snapshot_every must be at least 1");
  if (s.scent_cap < 1) v.emplace_back("scent_cap must be at least 1");
  check_params(s, v);
  const auto regions = effective_regions(s);
  check_regions(s, regions, v);

  World w;
  w.behavior = s.behavior;
  w.params = s.params;
  w.ground_enabled = s.flags.ground;
  w.scent_cap = s.scent_cap;
  w.flags = {s.flags.connectivity, s.flags.surface_scent, s.flags.instantaneous_scent};
  w.rng_seed = s.rng_seed;
  for (const auto& r : regions) w.regions.push_back({r.id, r.rect, r.weight});
  if (s.flags.conserve_weight) {
    double total = 0.0;
    for (const auto& r : regions) total += r.weight;
    w.conserved_total = total;
  }
  for (const auto& c : s.objects) {
    if (!has_lattice_parity(c)) v.push_back("object cell " + cell_str(c) + " is off the lattice");
    if (s.flags.ground && c.z < 0) v.push_back("object cell " + cell_str(c) + " is below ground");
    w.objects.insert(c);
  }

  std::vector<ModuleSpec> specs;
  auto region_of = [&](int i, int j) {
    for (const auto& r : regions) {
      if (r.rect.contains(i, j)) return r.id;
    }
    return -1;
  };
  if (s.board) {
    const auto& b = s.board->board;
    if (b.size_i < 1 || b.size_j < 1) v.emplace_back("board size must be positive");
    if (b.root_spacing < 1) v.emplace_back("root_spacing must be positive");
    if (b.height % 2 != 0) v.emplace_back("board height must be even");
    w.board = b;
    for (int i = 0; i < b.size_i; ++i) {
      for (int j = 0; j < b.size_j; ++j) {
        specs.push_back({b.cell(i, j), b.is_root_site(i, j) ? Mode::IRoot : Mode::Fixed, {}});
      }
    }
    if (const auto& r = s.board->reservoir) {
      if (r->i0 < 0 || r->j0 < 0 || r->i1 > b.size_i || r->j1 > b.size_j) {
        v.emplace_back("reservoir must lie within the board");
      }
      for (int i = r->i0; i < r->i1; ++i) {
        for (int j = r->j0; j < r->j1; ++j) specs.push_back({b.below(i, j), Mode::Sleep, {}});
      }
    }
  }
  if (s.blob) {
    const auto& blob = *s.blob;
    if (blob.size < 1) v.emplace_back("blob size must be positive");
    if (!has_lattice_parity(blob.origin)) v.emplace_back("blob origin is off the lattice");
    if (blob.size >= 1 && has_lattice_parity(blob.origin)) {
      CellSet taken;
      for (const auto& m : specs) taken.insert(m.cell);
      for (const auto& m : s.modules) taken.insert(m.cell);
      const auto cells = grow_blob(blob, taken, w.terrain(), gen);
      if (static_cast<int>(cells.size()) < blob.size) v.emplace_back("blob could not be grown");
      const auto base = specs.size();
      for (const auto& c : cells) specs.push_back({c, blob.fill, {}});
      for (const auto& [index, mode] : blob.marked) {
        if (index < 0 || index >= static_cast<int>(cells.size())) {
          v.push_back("blob marks index " + std::to_string(index) + " outside the blob");
        } else {
          specs[base + static_cast<std::size_t>(index)].mode = mode;
        }
      }
    }
  }
  specs.insert(specs.end(), s.modules.begin(), s.modules.end());
  if (specs.empty()) v.emplace_back("no modules");

  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    const auto label = "module " + std::to_string(i) + " at " + cell_str(spec.cell);
    if (!has_lattice_parity(spec.cell)) v.push_back(label + " is off the lattice");
    if (!mode_allowed(s.behavior, spec.mode)) {
      v.push_back(label + " has mode " + std::string(to_string(spec.mode)) + " not used by " +
                  std::string(to_string(s.behavior)));
    }
    if (w.objects.contains(spec.cell)) v.push_back(label + " overlaps the object");
    if (s.flags.ground && spec.cell.z < 0) v.push_back(label + " is below ground");
    auto [it, fresh] = w.occupancy.emplace(spec.cell, static_cast<ModuleId>(i));
    if (!fresh) {
      v.push_back("modules " + std::to_string(it->second) + " and " + std::to_string(i) +
                  " overlap at " + cell_str(spec.cell));
      continue;
    }
    ModuleRecord m;
    m.id = static_cast<ModuleId>(w.modules.size());
    m.cell = spec.cell;
    m.mode = spec.mode;
    m.scent = {s.scent_cap, s.scent_cap};
    m.memory.growth = spec.growth;
    if (is_root(spec.mode) && w.board) {
      if (auto ij = w.board->coords(spec.cell)) m.memory.region = region_of(ij->first, ij->second);
    }
    w.modules.push_back(m);
  }
  if (!v.empty()) throw ScenarioError(std::move(v));

  index_world(w);
  if (s.flags.connectivity) {
    std::vector<CellCoord> cells;
    for (const auto& m : w.modules) cells.push_back(m.cell);
    if (!is_connected(build_adjacency(cells, w.occupancy))) {
      throw ScenarioError({"initial configuration is not connected"});
    }
  }
  return w;
}

std::vector<ScheduledCommand> scheduled_commands(const Scenario& s) {
  std::vector<ScheduledCommand> out;
  for (const auto& w : s.weight_schedule) {
    out.push_back({w.tick, SetRegionWeight{w.region, w.weight}});
  }
  return out;
}

Simulation make_simulation(const Scenario& s, std::uint64_t seed,
                           std::vector<ScheduledCommand> extra) {
  Rng rng(seed);
  Rng gen = rng.split();
  World w = build_world(s, gen);
  w.rng_seed = seed;
  auto schedule = scheduled_commands(s);
  schedule.insert(schedule.end(), extra.begin(), extra.end());
  return Simulation(std::move(w), std::move(rng), std::move(schedule));
}

}  // namespace morph

#include "morph/wire.hpp"

#include <variant>

namespace morph {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Mode mode_from_json(const Json& j) {
  const auto name = j.get<std::string>();
  if (auto m = parse_mode(name)) return *m;
  throw WireError("unknown mode '" + name + "'");
}

Json move_to_json(ModuleId id, const MoveCandidate& m) {
  return Json{{"id", id},
              {"src", cell_to_json(m.src)},
              {"pivot", cell_to_json(m.pivot)},
              {"dst", cell_to_json(m.dst)}};
}

MoveCandidate move_from_json(const Json& j) {
  return {cell_from_json(j.at("src")), cell_from_json(j.at("pivot")), cell_from_json(j.at("dst"))};
}

Denial denial_from_json(const Json& j) {
  const auto name = j.get<std::string>();
  for (auto d : {Denial::DestinationOccupied, Denial::PivotVacated, Denial::TransitBlocked,
                 Denial::WouldDisconnect, Denial::GroundViolation}) {
    if (to_string(d) == name) return d;
  }
  throw WireError("unknown denial reason '" + name + "'");
}

}  // namespace

Json cell_to_json(const CellCoord& c) { return Json::array({c.x, c.y, c.z}); }

CellCoord cell_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw WireError("cell must be an array [x, y, z]");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

Json vec_to_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw WireError("vector must be an array [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json params_to_json(const BehaviorParams& p) {
  return Json{{"T", p.node_threshold},
              {"B", p.branch_count},
              {"p_max", p.p_max},
              {"p_min", p.p_min},
              {"F_max", p.f_max},
              {"F_min", p.f_min},
              {"bias", vec_to_json(p.bias)},
              {"seed_wake_probability", p.seed_wake_probability}};
}

BehaviorParams params_from_json(const Json& j, BehaviorParams p) {
  if (!j.is_object()) throw WireError("params must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "bias") {
      p.bias = vec_from_json(value);
    } else if (!value.is_number() || !set_param(p, key, value.get<double>())) {
      throw WireError("unknown or non-numeric param '" + key + "'");
    }
  }
  return p;
}

Json world_command_to_json(const WorldCommand& cmd) {
  return std::visit(
      Overloaded{
          [](const SetRegionWeight& c) {
            return Json{{"type", "set_weight"}, {"region", c.region}, {"weight", c.weight}};
          },
          [](const TranslateObject& c) {
            return Json{{"type", "move_object"}, {"offset", cell_to_json(c.offset)}};
          },
          [](const SetParam& c) {
            return Json{{"type", "set_param"}, {"name", c.name}, {"value", c.value}};
          },
      },
      cmd);
}

Json command_to_json(const Command& cmd) {
  return std::visit(Overloaded{
                        [](const Pause&) { return Json{{"type", "pause"}}; },
                        [](const Resume&) { return Json{{"type", "resume"}}; },
                        [](const Step& s) { return Json{{"type", "step"}, {"count", s.count}}; },
                        [](const auto& c) { return world_command_to_json(WorldCommand{c}); },
                    },
                    cmd);
}

Command command_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type")) throw WireError("command needs a 'type'");
  const auto type = j.at("type").get<std::string>();
  try {
    if (type == "set_weight") {
      return SetRegionWeight{j.at("region").get<int>(), j.at("weight").get<double>()};
    }
    if (type == "move_object") return TranslateObject{cell_from_json(j.at("offset"))};
    if (type == "set_param") {
      return SetParam{j.at("name").get<std::string>(), j.at("value").get<double>()};
    }
    if (type == "pause") return Pause{};
    if (type == "resume") return Resume{};
    if (type == "step") return Step{j.value("count", 1)};
  } catch (const Json::exception& e) {
    throw WireError("malformed " + type + " command: " + e.what());
  }
  throw WireError("unknown command type '" + type + "'");
}

WorldCommand world_command_from_json(const Json& j) {
  const auto cmd = command_from_json(j);
  return std::visit(Overloaded{
                        [](const SetRegionWeight& c) -> WorldCommand { return c; },
                        [](const TranslateObject& c) -> WorldCommand { return c; },
                        [](const SetParam& c) -> WorldCommand { return c; },
                        [](const auto&) -> WorldCommand {
                          throw WireError("run-control command where a world command was expected");
                        },
                    },
                    cmd);
}

Json snapshot_to_json(const Snapshot& s) {
  Json modules = Json::array();
  for (const auto& m : s.modules) {
    modules.push_back(Json{{"id", m.id},
                           {"cell", cell_to_json(m.cell)},
                           {"mode", to_string(m.mode)},
                           {"scent", m.scent}});
  }
  Json objects = Json::array();
  for (const auto& c : s.objects) objects.push_back(cell_to_json(c));
  Json regions = Json::array();
  for (const auto& r : s.regions) regions.push_back(Json{{"id", r.id}, {"weight", r.weight}});
  return Json{{"kind", "snapshot"},
              {"tick", s.tick},
              {"behavior", to_string(s.behavior)},
              {"paused", s.paused},
              {"modules", std::move(modules)},
              {"objects", std::move(objects)},
              {"regions", std::move(regions)},
              {"params", params_to_json(s.params)}};
}

Snapshot snapshot_from_json(const Json& j) {
  Snapshot s;
  s.tick = j.at("tick").get<std::int64_t>();
  const auto behavior = parse_behavior(j.at("behavior").get<std::string>());
  if (!behavior) throw WireError("unknown behavior in snapshot");
  s.behavior = *behavior;
  s.paused = j.value("paused", false);
  for (const auto& m : j.at("modules")) {
    s.modules.push_back({m.at("id").get<ModuleId>(), cell_from_json(m.at("cell")),
                         mode_from_json(m.at("mode")),
                         m.at("scent").get<std::vector<std::uint32_t>>()});
  }
  for (const auto& c : j.at("objects")) s.objects.push_back(cell_from_json(c));
  for (const auto& r : j.at("regions")) {
    s.regions.push_back({r.at("id").get<int>(), r.at("weight").get<double>()});
  }
  s.params = params_from_json(j.at("params"));
  return s;
}

Json tick_report_to_json(const TickReport& r) {
  Json commands = Json::array();
  for (const auto& c : r.commands) commands.push_back(world_command_to_json(c));
  Json applied = Json::array();
  for (const auto& a : r.applied) applied.push_back(move_to_json(a.id, a.move));
  Json denied = Json::array();
  for (const auto& d : r.denied) {
    auto j = move_to_json(d.id, d.move);
    j["reason"] = to_string(d.reason);
    denied.push_back(std::move(j));
  }
  Json transitions = Json::array();
  for (const auto& t : r.transitions) {
    transitions.push_back(Json{{"id", t.id},
                               {"from", to_string(t.from)},
                               {"to", to_string(t.to)},
                               {"by", t.by},
                               {"scent", t.scent}});
  }
  return Json{{"kind", "tick"},
              {"tick", r.tick},
              {"commands", std::move(commands)},
              {"applied", std::move(applied)},
              {"denied", std::move(denied)},
              {"transitions", std::move(transitions)}};
}

TickReport tick_report_from_json(const Json& j) {
  TickReport r;
  r.tick = j.at("tick").get<std::int64_t>();
  for (const auto& c : j.at("commands")) r.commands.push_back(world_command_from_json(c));
  for (const auto& a : j.at("applied")) r.applied.push_back({a.at("id").get<ModuleId>(), move_from_json(a)});
  for (const auto& d : j.at("denied")) {
    r.denied.push_back({d.at("id").get<ModuleId>(), move_from_json(d), denial_from_json(d.at("reason"))});
  }
  for (const auto& t : j.at("transitions")) {
    ModeTransition tr;
    tr.id = t.at("id").get<ModuleId>();
    tr.from = mode_from_json(t.at("from"));
    tr.to = mode_from_json(t.at("to"));
    tr.by = t.at("by").get<ModuleId>();
    const auto scent = t.at("scent").get<std::vector<std::uint32_t>>();
    for (std::size_t k = 0; k < scent.size() && k < kMaxChannels; ++k) tr.scent[k] = scent[k];
    r.transitions.push_back(tr);
  }
  return r;
}

}  // namespace morph

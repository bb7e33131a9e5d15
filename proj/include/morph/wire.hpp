#pragma once

// JSON encodings shared by scenario files, traces and the control server.

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "morph/engine.hpp"

namespace morph {

using Json = nlohmann::json;

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json cell_to_json(const CellCoord& c);
CellCoord cell_from_json(const Json& j);

Json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const Json& j);

Json params_to_json(const BehaviorParams& p);
/// Starts from `base` and overrides the keys present in `j`.
BehaviorParams params_from_json(const Json& j, BehaviorParams base = {});

Json command_to_json(const Command& cmd);
Command command_from_json(const Json& j);
Json world_command_to_json(const WorldCommand& cmd);
WorldCommand world_command_from_json(const Json& j);

Json snapshot_to_json(const Snapshot& s);
Snapshot snapshot_from_json(const Json& j);

Json tick_report_to_json(const TickReport& r);
TickReport tick_report_from_json(const Json& j);

}  // namespace morph

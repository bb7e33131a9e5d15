#include "morph/trace.hpp"

namespace morph {

TraceWriter::TraceWriter(std::ostream& out, const Scenario& scenario, std::uint64_t seed)
    : out_(out), every_(scenario.snapshot_every) {
  Scenario effective = scenario;
  effective.rng_seed = seed;
  meta_ = Json{{"kind", "meta"},
               {"schema_version", kScenarioSchemaVersion},
               {"rng_seed", seed},
               {"scenario", scenario_to_json(effective)}};
}

void TraceWriter::begin(const World& world) {
  out_ << meta_.dump() << '\n';
  snapshot(world);
}

void TraceWriter::record(const TickReport& report, const World& world) {
  out_ << tick_report_to_json(report).dump() << '\n';
  if (every_ > 0 && world.tick % every_ == 0) snapshot(world);
}

void TraceWriter::finish(const World& world) {
  if (last_snapshot_ != world.tick) snapshot(world);
  out_.flush();
}

void TraceWriter::snapshot(const World& world) {
  out_ << snapshot_to_json(snapshot_of(world)).dump() << '\n';
  last_snapshot_ = world.tick;
}

CorruptTrace::CorruptTrace(std::size_t line, const std::string& what)
    : std::runtime_error("record " + std::to_string(line) + ": " + what), line_(line) {}

TraceData read_trace(std::istream& in) {
  TraceData data;
  std::string line;
  std::size_t n = 0;
  bool have_meta = false;
  std::optional<std::int64_t> last_tick;
  while (std::getline(in, line)) {
    ++n;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error&) {
      throw CorruptTrace(n, "not valid JSON");
    }
    try {
      const auto kind = j.at("kind").get<std::string>();
      if (!have_meta) {
        if (kind != "meta") throw CorruptTrace(n, "trace must start with a meta record");
        if (j.at("schema_version").get<int>() != kScenarioSchemaVersion) {
          throw CorruptTrace(n, "unsupported schema_version");
        }
        data.seed = j.at("rng_seed").get<std::uint64_t>();
        data.scenario = scenario_from_json(j.at("scenario"));
        have_meta = true;
      } else if (kind == "tick") {
        auto r = tick_report_from_json(j);
        if (last_tick && r.tick != *last_tick + 1) throw CorruptTrace(n, "tick out of order");
        last_tick = r.tick;
        data.ticks.push_back(std::move(r));
      } else if (kind == "snapshot") {
        auto s = snapshot_from_json(j);
        if (!data.snapshots.empty() && s.tick <= data.snapshots.back().tick) {
          throw CorruptTrace(n, "snapshot out of order");
        }
        data.snapshots.push_back(std::move(s));
      } else {
        throw CorruptTrace(n, "unknown record kind '" + kind + "'");
      }
    } catch (const Json::exception& e) {
      throw CorruptTrace(n, e.what());
    } catch (const WireError& e) {
      throw CorruptTrace(n, e.what());
    }
  }
  if (!have_meta) throw CorruptTrace(n + 1, "empty trace");
  if (data.snapshots.empty()) throw CorruptTrace(n + 1, "trace has no snapshot");
  return data;
}

}  // namespace morph

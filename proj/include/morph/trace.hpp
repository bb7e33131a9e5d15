#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "morph/scenario.hpp"

namespace morph {

/// JSON-lines trace: one `meta` record, then a `tick` record per tick and a
/// `snapshot` record at tick 0, every `snapshot_every` ticks and at the end.
class TraceWriter {
 public:
  TraceWriter(std::ostream& out, const Scenario& scenario, std::uint64_t seed);

  /// Writes the meta record and the tick-0 snapshot.
  void begin(const World& world);
  /// Writes the tick record and, on cadence, the snapshot that follows it.
  void record(const TickReport& report, const World& world);
  /// Final snapshot unless one was just written.
  void finish(const World& world);

 private:
  void snapshot(const World& world);

  std::ostream& out_;
  Json meta_;
  int every_;
  std::optional<std::int64_t> last_snapshot_;
};

class CorruptTrace : public std::runtime_error {
 public:
  CorruptTrace(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct TraceData {
  Scenario scenario;
  std::uint64_t seed = 0;
  std::vector<TickReport> ticks;
  std::vector<Snapshot> snapshots;
};

/// Throws CorruptTrace naming the first bad record (1-based line).
TraceData read_trace(std::istream& in);

}  // namespace morph

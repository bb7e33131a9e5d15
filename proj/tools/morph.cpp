// morph: run scenarios headless, recompute metrics from traces, or serve a
// live simulation over HTTP.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "morph/builtin.hpp"
#include "morph/control_server.hpp"
#include "morph/metrics.hpp"
#include "morph/trace.hpp"

namespace {

using namespace morph;

enum Exit : int { kOk = 0, kUsage = 2, kScenario = 3, kIo = 4, kCorrupt = 5 };

struct Failure {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIo, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A file path, or failing that a built-in scenario name.
Scenario load_scenario(const std::string& ref) {
  if (std::filesystem::is_regular_file(ref)) {
    const auto text = read_file(ref);
    try {
      auto parsed = parse_scenario(text);
      for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
      return parsed.scenario;
    } catch (const ScenarioError& e) {
      std::ostringstream os;
      os << "invalid scenario " << ref << ':';
      for (const auto& v : e.violations()) os << "\n  " << v;
      throw Failure{kScenario, os.str()};
    }
  }
  if (auto s = builtin_scenario(ref)) return *s;
  throw Failure{kIo, "no such scenario file or built-in: " + ref};
}

std::vector<ScheduledCommand> load_commands(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<ScheduledCommand> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      const auto j = Json::parse(line);
      out.push_back({j.at("tick").get<std::int64_t>(), world_command_from_json(j.at("command"))});
    } catch (const std::exception& e) {
      throw Failure{kScenario, path + ":" + std::to_string(n) + ": " + e.what()};
    }
  }
  return out;
}

void print_summary(const std::vector<std::pair<std::string, std::string>>& lines) {
  for (const auto& [k, v] : lines) std::cout << k << '=' << v << '\n';
}

struct RunArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> ticks;
  std::string out = "trace.jsonl";
  std::optional<int> snapshot_every;
  std::optional<std::string> commands;
};

int run(const RunArgs& a) {
  Scenario s = load_scenario(a.scenario);
  if (a.snapshot_every) s.snapshot_every = *a.snapshot_every;
  if (s.snapshot_every < 1) throw Failure{kUsage, "--snapshot-every must be at least 1"};
  const auto seed = a.seed.value_or(s.rng_seed);
  const auto ticks = a.ticks.value_or(s.ticks);
  std::vector<ScheduledCommand> extra;
  if (a.commands) extra = load_commands(*a.commands);

  std::optional<Simulation> sim;
  try {
    sim.emplace(make_simulation(s, seed, std::move(extra)));
  } catch (const ScenarioError& e) {
    throw Failure{kScenario, std::string("invalid scenario: ") + e.what()};
  }
  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw Failure{kIo, "cannot write " + a.out};
  TraceWriter trace(out, s, seed);
  trace.begin(sim->world());
  std::vector<TickReport> reports;
  reports.reserve(static_cast<std::size_t>(std::max<std::int64_t>(ticks, 0)));
  try {
    for (std::int64_t t = 0; t < ticks; ++t) {
      reports.push_back(sim->tick());
      trace.record(reports.back(), sim->world());
    }
  } catch (const CommandError& e) {
    throw Failure{kScenario, std::string("scheduled command rejected: ") + e.what()};
  }
  trace.finish(sim->world());
  if (!out) throw Failure{kIo, "write failed for " + a.out};
  std::cout << "seed=" << seed << '\n';
  print_summary(summarize(s, reports, snapshot_of(sim->world())));
  std::cout << "trace=" << a.out << '\n';
  return kOk;
}

int metrics(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIo, "cannot read " + path};
  TraceData data;
  try {
    data = read_trace(in);
  } catch (const CorruptTrace& e) {
    throw Failure{kCorrupt, std::string("corrupt trace: ") + e.what()};
  }
  std::cout << "seed=" << data.seed << '\n';
  print_summary(summarize(data.scenario, data.ticks, data.snapshots.back()));
  return kOk;
}

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

struct ServeArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> ticks;
  ServerOptions options;
};

int serve(ServeArgs a) {
  Scenario s = load_scenario(a.scenario);
  const auto seed = a.seed.value_or(s.rng_seed);
  a.options.max_ticks = a.ticks;
  std::optional<ControlServer> server;
  try {
    server.emplace(s, seed, a.options);
  } catch (const ScenarioError& e) {
    throw Failure{kScenario, std::string("invalid scenario: ") + e.what()};
  } catch (const std::runtime_error& e) {
    throw Failure{kIo, e.what()};
  }
  int port = 0;
  try {
    port = server->start();
  } catch (const std::runtime_error& e) {
    throw Failure{kIo, e.what()};
  }
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening=http://" << a.options.host << ':' << port << "/v1\n" << std::flush;
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server->stop();
  return kOk;
}

int scenario(const std::string& ref, bool list) {
  if (list) {
    for (const auto& n : builtin_names()) std::cout << n << '\n';
    return kOk;
  }
  std::cout << serialize_scenario(load_scenario(ref));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice robot self-reconfiguration simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario to its tick budget and write a trace");
  run_cmd->add_option("--scenario", run_args.scenario, "Scenario file or built-in name")->required();
  run_cmd->add_option("--rng-seed", run_args.seed, "Overrides the scenario seed");
  run_cmd->add_option("--ticks", run_args.ticks, "Overrides the tick budget")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--out", run_args.out, "Trace output path")->capture_default_str();
  run_cmd->add_option("--snapshot-every", run_args.snapshot_every, "Snapshot interval in ticks");
  run_cmd->add_option("--commands", run_args.commands, "JSONL command log to replay");

  std::string trace_path;
  auto* metrics_cmd = app.add_subcommand("metrics", "Recompute summary metrics from a trace");
  metrics_cmd->add_option("trace", trace_path, "Trace file")->required();

  ServeArgs serve_args;
  std::string trace_out;
  std::string log_out;
  auto* serve_cmd = app.add_subcommand("serve", "Serve a live simulation under /v1");
  serve_cmd->add_option("--scenario", serve_args.scenario, "Scenario file or built-in name")->required();
  serve_cmd->add_option("--rng-seed", serve_args.seed, "Overrides the scenario seed");
  serve_cmd->add_option("--ticks", serve_args.ticks, "Stop advancing at this tick");
  serve_cmd->add_option("--host", serve_args.options.host)->capture_default_str();
  serve_cmd->add_option("--port", serve_args.options.port)->capture_default_str();
  serve_cmd->add_option("--tps", serve_args.options.ticks_per_second, "Ticks per second, 0 for unpaced")
      ->capture_default_str();
  serve_cmd->add_flag("--paused", serve_args.options.start_paused, "Start paused");
  serve_cmd->add_option("--out", trace_out, "Trace output path");
  serve_cmd->add_option("--command-log", log_out, "JSONL log of applied world commands");

  std::string scenario_ref;
  bool list = false;
  auto* scenario_cmd = app.add_subcommand("scenario", "Print a scenario as normalized JSON");
  scenario_cmd->add_option("name", scenario_ref, "Scenario file or built-in name");
  scenario_cmd->add_flag("--list", list, "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*metrics_cmd) return metrics(trace_path);
    if (*serve_cmd) {
      if (!trace_out.empty()) serve_args.options.trace_path = trace_out;
      if (!log_out.empty()) serve_args.options.command_log_path = log_out;
      return serve(serve_args);
    }
    if (*scenario_cmd) {
      if (!list && scenario_ref.empty()) throw Failure{kUsage, "scenario: give a name or --list"};
      return scenario(scenario_ref, list);
    }
  } catch (const Failure& f) {
    std::cerr << "morph: " << f.message << '\n';
    return f.code;
  }
  return kUsage;
}

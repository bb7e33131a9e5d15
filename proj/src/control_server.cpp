#include "morph/control_server.hpp"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <list>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "morph/trace.hpp"

namespace morph {

namespace {

struct Subscriber {
  std::int64_t interval = 1;
  std::deque<std::shared_ptr<const std::string>> queue;
};

constexpr std::size_t kMaxBacklog = 4096;

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

struct ControlServer::Impl {
  Impl(Scenario s, std::uint64_t seed_, ServerOptions o)
      : scenario(std::move(s)), seed(seed_), opt(std::move(o)), sim(make_simulation(scenario, seed)) {
    scenario_doc = scenario_to_json(scenario);
    scenario_doc["rng_seed"] = seed;
    if (opt.trace_path) {
      trace_file.open(*opt.trace_path, std::ios::binary);
      if (!trace_file) throw std::runtime_error("cannot open trace file " + *opt.trace_path);
      trace = std::make_unique<TraceWriter>(trace_file, scenario, seed);
      trace->begin(sim.world());
    }
    if (opt.command_log_path) {
      log_file.open(*opt.command_log_path, std::ios::binary);
      if (!log_file) throw std::runtime_error("cannot open command log " + *opt.command_log_path);
    }
    if (opt.start_paused) sim.enqueue(Pause{});
    latest = std::make_shared<const Snapshot>(snapshot_of(sim.world(), sim.paused()));
    routes();
  }

  bool budget_reached() const { return opt.max_ticks && sim.world().tick >= *opt.max_ticks; }

  /// `version` is drawn under sim_mu; an older snapshot never replaces a newer one.
  void publish(std::shared_ptr<const Snapshot> snap, std::uint64_t version, bool new_tick) {
    std::lock_guard lk(pub_mu);
    if (version > latest_version) {
      latest = snap;
      latest_version = version;
    }
    if (new_tick) {
      std::shared_ptr<const std::string> doc;
      for (auto it = subs.begin(); it != subs.end();) {
        auto& sub = **it;
        if (snap->tick % sub.interval == 0) {
          if (!doc) doc = std::make_shared<const std::string>(snapshot_to_json(*snap).dump());
          sub.queue.push_back(doc);
        }
        // A reader this far behind has stalled; drop it rather than buffer forever.
        it = sub.queue.size() > kMaxBacklog ? subs.erase(it) : std::next(it);
      }
    }
    pub_cv.notify_all();
  }

  void run_loop() {
    using Clock = std::chrono::steady_clock;
    auto next = Clock::now();
    std::unique_lock lk(sim_mu);
    while (!stopping) {
      loop_cv.wait(lk, [&] { return stopping || (sim.can_advance() && !budget_reached()); });
      if (stopping) break;
      const bool paced = !sim.paused() && opt.ticks_per_second > 0.0;
      const auto report = sim.advance();
      if (trace) trace->record(report, sim.world());
      auto snap = std::make_shared<const Snapshot>(snapshot_of(sim.world(), sim.paused()));
      const auto version = ++snapshot_version;
      lk.unlock();
      publish(std::move(snap), version, true);
      lk.lock();
      if (paced) {
        next += std::chrono::duration_cast<Clock::duration>(
            std::chrono::duration<double>(1.0 / opt.ticks_per_second));
        const auto now = Clock::now();
        if (next < now) next = now;
        loop_cv.wait_until(lk, next, [&] { return stopping.load(); });
      } else {
        next = Clock::now();
      }
    }
  }

  void handle_command(const httplib::Request& req, httplib::Response& res) {
    Command cmd;
    try {
      cmd = command_from_json(Json::parse(req.body));
    } catch (const Json::exception& e) {
      return send_json(res, 400, {{"ok", false}, {"error", std::string("malformed JSON: ") + e.what()}});
    } catch (const WireError& e) {
      return send_json(res, 400, {{"ok", false}, {"error", e.what()}});
    }
    Ack ack;
    {
      std::lock_guard lk(sim_mu);
      try {
        ack = sim.enqueue(cmd);
      } catch (const CommandError& e) {
        return send_json(res, 400, {{"ok", false}, {"error", e.what()}});
      }
      const bool world_cmd = std::holds_alternative<SetRegionWeight>(cmd) ||
                             std::holds_alternative<TranslateObject>(cmd) ||
                             std::holds_alternative<SetParam>(cmd);
      if (world_cmd) {
        Json entry{{"tick", ack.target_tick}, {"command", command_to_json(cmd)}};
        if (log_file.is_open()) log_file << entry.dump() << '\n' << std::flush;
        command_log.push_back(std::move(entry));
      }
      if (std::holds_alternative<Pause>(cmd) || std::holds_alternative<Resume>(cmd)) {
        publish(std::make_shared<const Snapshot>(snapshot_of(sim.world(), sim.paused())), ++snapshot_version,
                false);
      }
    }
    loop_cv.notify_all();
    send_json(res, 200, {{"ok", true}, {"target_tick", ack.target_tick}});
  }

  void handle_events(const httplib::Request& req, httplib::Response& res) {
    std::int64_t interval = 1;
    if (req.has_param("interval")) {
      try {
        interval = std::stoll(req.get_param_value("interval"));
      } catch (const std::exception&) {
        interval = 0;
      }
    }
    if (interval < 1) {
      return send_json(res, 400, {{"ok", false}, {"error", "interval must be a positive integer"}});
    }
    auto sub = std::make_shared<Subscriber>();
    sub->interval = interval;
    {
      std::lock_guard lk(pub_mu);
      subs.push_back(sub);
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream",
        [this, sub](std::size_t, httplib::DataSink& sink) {
          std::unique_lock lk(pub_mu);
          pub_cv.wait_for(lk, opt.heartbeat, [&] { return stopping || !sub->queue.empty(); });
          if (stopping) {
            lk.unlock();
            sink.done();
            return false;
          }
          std::string msg;
          if (sub->queue.empty()) {
            const Json beat{{"tick", latest->tick}, {"paused", latest->paused}};
            msg = "event: heartbeat\ndata: " + beat.dump() + "\n\n";
          } else {
            msg = "event: snapshot\ndata: " + *sub->queue.front() + "\n\n";
            sub->queue.pop_front();
          }
          lk.unlock();
          return sink.write(msg.data(), msg.size());
        },
        [this, sub](bool) {
          std::lock_guard lk(pub_mu);
          subs.remove(sub);
        });
  }

  void routes() {
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    http.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
    http.Get("/v1/state", [this](const httplib::Request&, httplib::Response& res) {
      std::shared_ptr<const Snapshot> snap;
      {
        std::lock_guard lk(pub_mu);
        snap = latest;
      }
      send_json(res, 200, snapshot_to_json(*snap));
    });
    http.Get("/v1/scenario", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, scenario_doc);
    });
    http.Get("/v1/commands", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lk(sim_mu);
      send_json(res, 200, command_log);
    });
    http.Post("/v1/command", [this](const httplib::Request& req, httplib::Response& res) {
      handle_command(req, res);
    });
    http.Get("/v1/events", [this](const httplib::Request& req, httplib::Response& res) {
      handle_events(req, res);
    });
  }

  Scenario scenario;
  std::uint64_t seed;
  ServerOptions opt;
  Json scenario_doc;

  std::mutex sim_mu;  // guards sim, trace, command log
  std::condition_variable loop_cv;
  Simulation sim;
  std::ofstream trace_file;
  std::unique_ptr<TraceWriter> trace;
  std::ofstream log_file;
  Json command_log = Json::array();
  std::uint64_t snapshot_version = 0;

  std::mutex pub_mu;  // guards latest, subs
  std::condition_variable pub_cv;
  std::shared_ptr<const Snapshot> latest;
  std::uint64_t latest_version = 0;
  std::list<std::shared_ptr<Subscriber>> subs;

  std::atomic<bool> stopping{false};
  bool stopped = false;
  httplib::Server http;
  int bound_port = -1;
  std::thread loop_thread;
  std::thread http_thread;
};

ControlServer::ControlServer(Scenario scenario, std::uint64_t seed, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(scenario), seed, std::move(options))) {}

ControlServer::~ControlServer() { stop(); }

int ControlServer::start() {
  auto& m = *impl_;
  if (m.opt.port == 0) {
    m.bound_port = m.http.bind_to_any_port(m.opt.host);
  } else if (m.http.bind_to_port(m.opt.host, m.opt.port)) {
    m.bound_port = m.opt.port;
  }
  if (m.bound_port < 0) {
    throw std::runtime_error("cannot bind " + m.opt.host + ":" + std::to_string(m.opt.port));
  }
  m.http_thread = std::thread([&m] { m.http.listen_after_bind(); });
  m.loop_thread = std::thread([&m] { m.run_loop(); });
  return m.bound_port;
}

int ControlServer::port() const { return impl_->bound_port; }

void ControlServer::stop() {
  auto& m = *impl_;
  if (m.stopped) return;
  m.stopped = true;
  {
    std::lock_guard lk(m.sim_mu);
    m.stopping = true;
  }
  m.loop_cv.notify_all();
  {
    std::lock_guard lk(m.pub_mu);
  }
  m.pub_cv.notify_all();
  if (m.loop_thread.joinable()) m.loop_thread.join();
  m.http.stop();
  if (m.http_thread.joinable()) m.http_thread.join();
  std::lock_guard lk(m.sim_mu);
  if (m.trace) m.trace->finish(m.sim.world());
}

}  // namespace morph

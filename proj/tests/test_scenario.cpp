#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "morph/builtin.hpp"
#include "morph/metrics.hpp"
#include "morph/scenario.hpp"
#include "morph/trace.hpp"
#include "support.hpp"

using namespace morph;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool mentions(const ScenarioError& e, std::string_view needle) {
  for (const auto& v : e.violations()) {
    if (v.find(needle) != std::string::npos) return true;
  }
  return false;
}

Scenario tiny_chain() {
  Scenario s;
  s.name = "tiny";
  s.modules = {{{0, 0, 0}, Mode::Seed, std::nullopt}, {{1, 1, 0}, Mode::Sleep, std::nullopt}};
  return s;
}

Snapshot snap(std::vector<std::pair<CellCoord, Mode>> mods, std::vector<CellCoord> objects = {}) {
  auto w = test::make_world(BehaviorKind::Adaptive, mods);
  w.objects.insert(objects.begin(), objects.end());
  return snapshot_of(w);
}

std::string run_trace(const Scenario& s, std::uint64_t seed, std::int64_t ticks) {
  std::ostringstream out;
  auto sim = make_simulation(s, seed);
  TraceWriter tw(out, s, seed);
  tw.begin(sim.world());
  for (std::int64_t t = 0; t < ticks; ++t) {
    const auto r = sim.tick();
    tw.record(r, sim.world());
  }
  tw.finish(sim.world());
  return out.str();
}

}  // namespace

TEST_CASE("shipped table scenario") {
  const auto parsed = parse_scenario(read_file(MORPH_SCENARIO_DIR "/table-30x30.json"));
  const auto& s = parsed.scenario;
  CHECK(parsed.warnings.empty());
  CHECK(s.behavior == BehaviorKind::Adaptive);
  CHECK(effective_regions(s).size() == 2);
  REQUIRE(s.board);
  CHECK(s.board->board.root_spacing == 3);
  CHECK(s.board->board.size_i == 30);
  CHECK(s.board->board.size_j == 30);
  CHECK(s.params.p_max == 0.05);
  CHECK(s.params.p_min == 0.05);
  CHECK(s.params.f_max == 2.0);
  CHECK(s.params.f_min == 1.0);
  double total = 0;
  for (const auto& r : effective_regions(s)) total += r.weight;
  CHECK(total == 10.0);
}

TEST_CASE("shipped scenarios match the built-ins") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const auto text = read_file(std::string(MORPH_SCENARIO_DIR "/") + name + ".json");
    CHECK(parse_scenario(text).scenario == *builtin_scenario(name));
    CHECK(serialize_scenario(*builtin_scenario(name)) == text);
  }
}

TEST_CASE("parse errors") {
  SUBCASE("no modules") {
    auto s = tiny_chain();
    s.modules.clear();
    try {
      parse_scenario(serialize_scenario(s));
      FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
      CHECK(mentions(e, "no modules"));
    }
  }
  SUBCASE("overlap") {
    auto s = tiny_chain();
    s.modules[1].cell = {0, 0, 0};
    try {
      parse_scenario(serialize_scenario(s));
      FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
      CHECK(mentions(e, "overlap"));
    }
  }
  SUBCASE("several violations are listed together") {
    auto s = tiny_chain();
    s.modules[1].cell = {1, 0, 0};
    s.objects = {{0, 0, 0}};
    s.ticks = -1;
    try {
      parse_scenario(serialize_scenario(s));
      FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
      CHECK(e.violations().size() >= 3);
      CHECK(mentions(e, "off the lattice"));
    }
  }
  SUBCASE("disconnected") {
    auto s = tiny_chain();
    s.modules[1].cell = {4, 0, 0};
    CHECK_THROWS_WITH_AS(parse_scenario(serialize_scenario(s)),
                         doctest::Contains("not connected"), ScenarioError);
  }
  SUBCASE("syntax error position") {
    try {
      parse_scenario("{\n  \"name\": \"x\",\n  \"behavior\" \"chain\"\n}\n");
      FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
      CHECK(mentions(e, "line 3"));
      CHECK(mentions(e, "column"));
    }
  }
  SUBCASE("unknown field and bad mode") {
    auto j = scenario_to_json(tiny_chain());
    j["colour"] = "red";
    CHECK_THROWS_WITH_AS(parse_scenario(j.dump()), doctest::Contains("colour"), ScenarioError);
    j.erase("colour");
    j["modules"][0]["mode"] = "WANDER";
    CHECK_THROWS_AS(parse_scenario(j.dump()), ScenarioError);
  }
  SUBCASE("F_min above one warns") {
    auto s = table_scenario();
    s.params.f_min = 1.5;
    const auto parsed = parse_scenario(serialize_scenario(s));
    REQUIRE(parsed.warnings.size() == 1);
    CHECK(parsed.warnings[0].find("F_min") != std::string::npos);
  }
}

TEST_CASE("parse, serialize, parse is the identity") {
  Rng rng(17);
  for (int i = 0; i < 25; ++i) {
    Scenario s;
    s.name = "random-" + std::to_string(i);
    s.behavior = static_cast<BehaviorKind>(rng.uniform_index(2));
    s.blob = BlobSpec{static_cast<int>(2 + rng.uniform_index(40)), {0, 0, 0}, Mode::Sleep, {{0, Mode::Seed}}};
    s.params.p_max = rng.uniform01();
    s.params.node_threshold = 1 + static_cast<int>(rng.uniform_index(20));
    s.rng_seed = rng.next();
    s.ticks = static_cast<std::int64_t>(rng.uniform_index(100000));
    s.snapshot_every = 1 + static_cast<int>(rng.uniform_index(50));
    s.flags.instantaneous_scent = rng.bernoulli(0.5);
    s.flags.connectivity = rng.bernoulli(0.5);
    const auto once = parse_scenario(serialize_scenario(s)).scenario;
    CHECK(once == s);
    CHECK(parse_scenario(serialize_scenario(once)).scenario == once);
  }
  for (const auto& name : builtin_names()) {
    const auto s = *builtin_scenario(name);
    CHECK(parse_scenario(serialize_scenario(s)).scenario == s);
  }
}

TEST_CASE("blob generation is seeded and connected") {
  const auto s = chain_scenario(50);
  auto cells = [&](std::uint64_t seed) {
    auto sim = make_simulation(s, seed);
    std::vector<CellCoord> out;
    for (const auto& m : sim.world().modules) out.push_back(m.cell);
    return out;
  };
  CHECK(cells(3) == cells(3));
  CHECK(cells(3) != cells(4));
  CHECK(cells(3).size() == 50);
  CHECK_NOTHROW(check_invariants(make_simulation(s, 3).world()));
}

TEST_CASE("table world layout") {
  const auto w = make_simulation(table_scenario(), 1).world();
  int roots = 0;
  int board = 0;
  int reservoir = 0;
  for (const auto& m : w.modules) {
    roots += is_root(m.mode) ? 1 : 0;
    board += is_board(m.mode) ? 1 : 0;
    reservoir += m.mode == Mode::Sleep ? 1 : 0;
  }
  CHECK(board == 900);
  CHECK(roots == 100);
  CHECK(reservoir > 0);
  CHECK(w.conserved_total == 10.0);
  for (const auto& m : w.modules) CHECK(m.cell.z >= 0);
}

TEST_CASE("trace round trip") {
  auto s = chain_scenario(12);
  s.snapshot_every = 7;
  const auto text = run_trace(s, 9, 30);
  CHECK(text == run_trace(s, 9, 30));
  CHECK(text != run_trace(s, 10, 30));

  std::istringstream in(text);
  const auto data = read_trace(in);
  CHECK(data.seed == 9);
  CHECK(data.scenario.rng_seed == 9);
  CHECK(data.ticks.size() == 30);
  REQUIRE(data.snapshots.size() == 6);  // 0, 7, 14, 21, 28, final 30
  CHECK(data.snapshots.front().tick == 0);
  CHECK(data.snapshots.back().tick == 30);
  for (std::size_t i = 0; i < data.ticks.size(); ++i) CHECK(data.ticks[i].tick == static_cast<std::int64_t>(i));

  auto sim = make_simulation(s, 9);
  for (int t = 0; t < 30; ++t) sim.tick();
  CHECK(data.snapshots.back() == snapshot_of(sim.world()));
}

TEST_CASE("corrupt traces") {
  const auto good = run_trace(chain_scenario(6), 1, 5);
  auto lines = [&] {
    std::vector<std::string> out;
    std::istringstream in(good);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  }();
  auto join = [](const std::vector<std::string>& ls) {
    std::string s;
    for (const auto& l : ls) s += l + "\n";
    return s;
  };
  auto fails_at = [](const std::string& text, std::size_t line) {
    std::istringstream in(text);
    try {
      read_trace(in);
    } catch (const CorruptTrace& e) {
      return e.line() == line;
    }
    return false;
  };
  CHECK(fails_at("", 1));
  CHECK(fails_at("{\"kind\":\"tick\"}\n", 1));
  auto truncated = lines;
  truncated[3] = truncated[3].substr(0, truncated[3].size() / 2);
  CHECK(fails_at(join(truncated), 4));
  auto swapped = lines;
  std::swap(swapped[2], swapped[3]);
  CHECK(fails_at(join(swapped), 4));
  auto no_snapshots = std::vector<std::string>{lines[0], lines[2]};
  CHECK_THROWS_AS([&] {
    std::istringstream in(join(no_snapshots));
    read_trace(in);
  }(), CorruptTrace);
}

TEST_CASE("is_single_chain examples") {
  CHECK(is_single_chain(snap({{{0, 0, 0}, Mode::Final}, {{1, 1, 0}, Mode::Final}, {{2, 2, 0}, Mode::Final},
                              {{3, 3, 0}, Mode::Final}, {{4, 4, 0}, Mode::Seed}})));
  CHECK_FALSE(is_single_chain(snap({{{0, 0, 0}, Mode::Final}, {{1, 1, 0}, Mode::Final}, {{2, 2, 0}, Mode::Final},
                                    {{1, 2, 1}, Mode::Final}, {{1, 3, 2}, Mode::Final}})));
  CHECK_FALSE(is_single_chain(snap({{{0, 0, 0}, Mode::Final}, {{1, 1, 0}, Mode::Final}, {{2, 2, 0}, Mode::Final},
                                    {{0, 0, 6}, Mode::Final}, {{1, 1, 6}, Mode::Final}, {{2, 2, 6}, Mode::Final}})));
  CHECK(is_single_chain(snap({{{0, 0, 0}, Mode::Seed}})));
  // Three mutually adjacent cells: degree 2 everywhere but no ends.
  CHECK_FALSE(is_single_chain(snap({{{0, 0, 0}, Mode::Final}, {{1, 1, 0}, Mode::Final}, {{1, 0, 1}, Mode::Final}})));
}

TEST_CASE("count_legs examples") {
  const Board board{2, 4, 4, 3, 0};
  const std::vector<RegionSpec> regions{{1, {0, 0, 2, 4}, 5.0}, {2, {2, 0, 4, 4}, 5.0}};
  // Board row j = 0: cells (i, i, 2); root at i = 0, an idle root at i = 3.
  std::vector<std::pair<CellCoord, Mode>> top;
  for (int i = 0; i < 4; ++i) top.push_back({board.cell(i, 0), i == 0 ? Mode::Root : i == 3 ? Mode::IRoot : Mode::Fixed});
  CHECK(count_legs(snap(top), board, regions).total == 0);

  auto leg = top;
  leg.push_back({{0, 1, 1}, Mode::Final});
  leg.push_back({{0, 0, 0}, Mode::Seed});
  const auto one = count_legs(snap(leg), board, regions);
  CHECK(one.total == 1);
  CHECK(one.per_region.at(1) == 1);
  CHECK_FALSE(one.per_region.contains(2));

  auto partial = leg;
  partial.push_back({{4, 3, 1}, Mode::Final});  // hangs from the idle root, off the ground
  partial.push_back({{2, 1, 1}, Mode::Search});
  CHECK(count_legs(snap(partial), board, regions).total == 1);

  auto unrooted = top;
  unrooted.push_back({{3, 2, 1}, Mode::Final});
  unrooted.push_back({{3, 3, 0}, Mode::Final});
  CHECK(count_legs(snap(unrooted), board, regions).total == 0);
}

TEST_CASE("stabilization and switches") {
  std::vector<TickReport> ticks(80);
  for (std::size_t i = 0; i < ticks.size(); ++i) ticks[i].tick = static_cast<std::int64_t>(i);
  ticks[3].applied.push_back({});
  ticks[40].transitions.push_back({0, Mode::IRoot, Mode::ARoot, 0, {}});
  ticks[50].transitions.push_back({1, Mode::Root, Mode::IRoot, 1, {}});
  ticks[50].transitions.push_back({2, Mode::Sleep, Mode::Search, 2, {}});
  CHECK(stabilization_time(ticks, 0) == 4);
  CHECK(stabilization_time(ticks, 35) == 51);
  CHECK(stabilization_time(ticks, 60) == std::nullopt);  // only 20 quiet ticks remain
  CHECK(stabilization_time(ticks, 60, 20) == 60);
  CHECK(root_switches(ticks, 0, 80) == 2);
  CHECK(root_switches(ticks, 41, 80) == 1);
  std::vector<TickReport> busy(100);
  for (std::size_t i = 0; i < busy.size(); ++i) {
    busy[i].tick = static_cast<std::int64_t>(i);
    if (i % 20 == 0) busy[i].applied.push_back({});
  }
  CHECK(stabilization_time(busy, 0) == std::nullopt);
}

TEST_CASE("grasp_contacts examples") {
  const std::vector<CellCoord> obj{{0, 0, 0}};
  CHECK(grasp_contacts(snap({{{4, 0, 0}, Mode::Final}}, obj)) == Contacts{0, 0});
  CHECK(grasp_contacts(snap({{{1, 1, 0}, Mode::Touch}, {{2, 2, 0}, Mode::Final}}, obj)) == Contacts{1, 1});
  std::vector<std::pair<CellCoord, Mode>> shell;
  for (const auto& n : neighbors({0, 0, 0})) shell.push_back({n, Mode::Touch});
  CHECK(grasp_contacts(snap(shell, obj)) == Contacts{12, 12});
  // A touching module away from the object does not count.
  CHECK(grasp_contacts(snap({{{1, 1, 0}, Mode::TouchSeed}, {{2, 2, 0}, Mode::Touch}}, obj)) == Contacts{1, 1});
}

TEST_CASE("adaptive safety over a weight shift") {
  const auto s = table_scenario();
  auto sim = make_simulation(s, 2);
  std::map<int, int> prev;
  auto active = [&] {
    std::map<int, int> out;
    for (const auto& r : sim.world().regions) out[r.id] = 0;
    for (const auto id : sim.world().roots) {
      const auto& m = sim.world().module(id);
      if (is_active_root(m.mode)) ++out[m.memory.region];
    }
    return out;
  };
  prev = active();
  for (int t = 0; t < 900; ++t) {
    sim.tick();
    const auto now = active();
    for (const auto& r : sim.world().regions) {
      if (r.weight >= 1.0 && prev[r.id] > 0) CHECK(now.at(r.id) > 0);
    }
    prev = now;
  }
  CHECK(prev.at(2) > 0);
  CHECK(prev.at(1) == 0);
}

TEST_CASE("touching modules stay touching") {
  const auto s = *builtin_scenario("grasp-8");
  auto sim = make_simulation(s, 3);
  std::set<ModuleId> touching;
  for (int t = 0; t < 1500; ++t) {
    const auto r = sim.tick();
    for (const auto& tr : r.transitions) {
      if (touching.contains(tr.id)) CHECK((tr.to == Mode::Touch || tr.to == Mode::TouchSeed));
      if (tr.to == Mode::Touch || tr.to == Mode::TouchSeed) touching.insert(tr.id);
    }
    for (const auto id : touching) {
      const auto m = sim.world().module(id).mode;
      CHECK((m == Mode::Touch || m == Mode::TouchSeed));
    }
  }
  CHECK(touching.size() >= 6);
}

TEST_CASE("summary is a pure function of the trace") {
  const auto s = chain_scenario(20);
  const auto text = run_trace(s, 4, 200);
  std::istringstream a(text);
  std::istringstream b(text);
  const auto da = read_trace(a);
  const auto db = read_trace(b);
  const auto sa = summarize(da.scenario, da.ticks, da.snapshots.back());
  CHECK(sa == summarize(db.scenario, db.ticks, db.snapshots.back()));
  CHECK(sa.front() == std::pair<std::string, std::string>{"behavior", "chain"});
}

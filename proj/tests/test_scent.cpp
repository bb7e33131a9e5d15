#include <deque>
#include <limits>

#include "doctest.h"
#include "morph/scent.hpp"
#include "support.hpp"

using namespace morph;

namespace {

struct Field {
  std::vector<CellCoord> cells;
  OccupancyMap occ;
  Adjacency graph;
};

Field field_of(std::vector<CellCoord> cells) {
  Field f;
  f.cells = std::move(cells);
  for (std::size_t i = 0; i < f.cells.size(); ++i) f.occ.emplace(f.cells[i], static_cast<ModuleId>(i));
  f.graph = build_adjacency(f.cells, f.occ);
  return f;
}

std::vector<CellCoord> straight(int n) {
  std::vector<CellCoord> out;
  for (int i = 0; i < n; ++i) out.push_back({i, i, 0});
  return out;
}

/// Independent hop-distance oracle: Bellman-Ford style relaxation over cells,
/// no shared code with the library BFS.
std::vector<std::uint32_t> relax_oracle(const std::vector<CellCoord>& cells,
                                        const std::vector<bool>& emit, std::uint32_t cap) {
  const auto n = cells.size();
  std::vector<std::uint32_t> d(n, cap);
  for (std::size_t i = 0; i < n; ++i) {
    if (emit[i]) d[i] = 0;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto diff = cells[i] - cells[j];
        if (!is_face_offset(diff) || d[j] == cap) continue;
        if (d[j] + 1 < d[i]) {
          d[i] = d[j] + 1;
          changed = true;
        }
      }
    }
  }
  return d;
}

std::vector<std::uint32_t> run_steps(const Field& f, std::vector<std::uint32_t> v,
                                     const std::vector<ScentRole>& roles, std::uint32_t cap, int ticks) {
  for (int t = 0; t < ticks; ++t) v = step_channel(f.graph, v, roles, cap);
  return v;
}

}  // namespace

TEST_CASE("four-module chain settles to 0, 1, 2, 3") {
  const auto f = field_of(straight(4));
  std::vector<ScentRole> roles(4, ScentRole::Propagate);
  roles[0] = ScentRole::Emit;
  // Emitters hold 0 at every tick boundary; everyone else starts at cap.
  std::vector<std::uint32_t> start(4, kDefaultScentCap);
  start[0] = 0;
  const auto v = run_steps(f, start, roles, kDefaultScentCap, 3);
  CHECK(v == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("no emitters keeps everything at cap") {
  const auto f = field_of(straight(5));
  std::vector<ScentRole> roles(5, ScentRole::Propagate);
  const std::vector<std::uint32_t> cap(5, kDefaultScentCap);
  CHECK(run_steps(f, cap, roles, kDefaultScentCap, 10) == cap);
}

TEST_CASE("inert and isolated modules keep their value") {
  const auto f = field_of({{0, 0, 0}, {1, 1, 0}, {10, 0, 0}});
  const std::vector<ScentRole> roles{ScentRole::Emit, ScentRole::Inert, ScentRole::Propagate};
  const auto v = step_channel(f.graph, std::vector<std::uint32_t>{9, 7, 5}, roles, 100);
  CHECK(v == std::vector<std::uint32_t>{0, 7, 5});
}

TEST_CASE("distance oracle examples") {
  const auto f = field_of(straight(7));
  const std::vector<ModuleId> one{0};
  CHECK(distance_oracle(f.graph, one, 100) == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5, 6});
  const std::vector<ModuleId> ends{0, 6};
  CHECK(distance_oracle(f.graph, ends, 100) == std::vector<std::uint32_t>{0, 1, 2, 3, 2, 1, 0});
  const std::vector<ModuleId> all{0, 1, 2, 3, 4, 5, 6};
  CHECK(distance_oracle(f.graph, all, 100) == std::vector<std::uint32_t>(7, 0));
  const auto split = field_of({{0, 0, 0}, {5, 5, 0}});
  CHECK(distance_oracle(split.graph, one, 100) == std::vector<std::uint32_t>{0, 100});
}

TEST_CASE("library BFS agrees with an independent relaxation oracle") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = field_of(test::random_blob(rng, 1 + rng.uniform_index(40)));
    const auto n = f.cells.size();
    std::vector<bool> emit(n, false);
    std::vector<ModuleId> sources;
    for (std::size_t k = 0; k < 1 + rng.uniform_index(3); ++k) {
      const auto e = rng.uniform_index(n);
      if (!emit[e]) sources.push_back(static_cast<ModuleId>(e));
      emit[e] = true;
    }
    CHECK(distance_oracle(f.graph, sources, 500) == relax_oracle(f.cells, emit, 500));
  }
}

TEST_CASE("after k ticks every module within k hops is exact; after the diameter, all are") {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = field_of(test::random_blob(rng, 25));
    const auto n = f.cells.size();
    std::vector<ScentRole> roles(n, ScentRole::Propagate);
    std::vector<ModuleId> sources{static_cast<ModuleId>(rng.uniform_index(n))};
    roles[static_cast<std::size_t>(sources[0])] = ScentRole::Emit;
    const auto oracle = distance_oracle(f.graph, sources, kDefaultScentCap);
    const auto diameter = *std::max_element(oracle.begin(), oracle.end());
    std::vector<std::uint32_t> v(n, kDefaultScentCap);
    v[static_cast<std::size_t>(sources[0])] = 0;
    for (std::uint32_t k = 1; k <= diameter; ++k) {
      v = step_channel(f.graph, v, roles, kDefaultScentCap);
      for (std::size_t i = 0; i < n; ++i) {
        if (oracle[i] <= k) CHECK(v[i] == oracle[i]);
      }
    }
    CHECK(v == oracle);
    // Converged fields are 1-Lipschitz across faces.
    for (std::size_t i = 0; i < n; ++i) {
      for (auto j : f.graph[i]) {
        const auto a = v[i], b = v[static_cast<std::size_t>(j)];
        CHECK((a > b ? a - b : b - a) <= 1);
      }
    }
  }
}

TEST_CASE("healing after the emitters go quiet counts up to cap") {
  Rng rng(4);
  constexpr std::uint32_t kCap = 40;
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = field_of(test::random_blob(rng, 20));
    const auto n = f.cells.size();
    std::vector<ScentRole> roles(n, ScentRole::Propagate);
    roles[0] = ScentRole::Emit;
    auto v = run_steps(f, std::vector<std::uint32_t>(n, kCap), roles, kCap, 30);
    roles[0] = ScentRole::Propagate;
    std::uint32_t prev_min = 0;
    for (int t = 0; t < 60; ++t) {
      const auto next = step_channel(f.graph, v, roles, kCap);
      for (std::size_t i = 0; i < n; ++i) CHECK(next[i] >= v[i]);
      const auto lo = *std::min_element(next.begin(), next.end());
      if (lo < kCap) CHECK(lo > prev_min);
      prev_min = lo;
      v = next;
    }
    CHECK(v == std::vector<std::uint32_t>(n, kCap));
  }
}

TEST_CASE("settle_channel is the fixed point of step_channel") {
  Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const auto f = field_of(test::random_blob(rng, 2 + rng.uniform_index(50)));
    const auto n = f.cells.size();
    std::vector<ScentRole> roles(n);
    std::vector<std::uint32_t> prev(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = rng.uniform_index(10);
      roles[i] = r == 0 ? ScentRole::Emit : r == 1 ? ScentRole::Inert : ScentRole::Propagate;
      prev[i] = static_cast<std::uint32_t>(rng.uniform_index(80));
    }
    const auto settled = settle_channel(f.graph, prev, roles, 80);
    CHECK(step_channel(f.graph, settled, roles, 80) == settled);
    // Same as running the synchronous update long enough when values start high.
    std::vector<std::uint32_t> high(n, 80);
    for (std::size_t i = 0; i < n; ++i) {
      if (roles[i] == ScentRole::Inert) high[i] = prev[i];
    }
    CHECK(run_steps(f, high, roles, 80, 200) == settle_channel(f.graph, high, roles, 80));
  }
}

TEST_CASE("surface mask") {
  SUBCASE("single module") {
    const auto f = field_of({{0, 0, 0}});
    CHECK(surface_mask(f.cells, f.occ, {}) == std::vector<bool>{true});
  }
  SUBCASE("center of a filled ball is interior") {
    auto cells = std::vector<CellCoord>{{0, 0, 0}};
    for (const auto& n : neighbors({0, 0, 0})) cells.push_back(n);
    const auto f = field_of(cells);
    const auto mask = surface_mask(f.cells, f.occ, {});
    CHECK_FALSE(mask[0]);
    for (std::size_t i = 1; i < mask.size(); ++i) CHECK(mask[i]);
  }
  SUBCASE("chain modules are all on the surface") {
    const auto f = field_of(straight(6));
    for (bool b : surface_mask(f.cells, f.occ, {})) CHECK(b);
  }
  SUBCASE("objects and ground are not free cells") {
    CellSet objects;
    for (const auto& n : neighbors({0, 0, 0})) {
      if (n.z >= 0) objects.insert(n);
    }
    const auto f = field_of({{0, 0, 0}});
    CHECK(surface_mask(f.cells, f.occ, {&objects, false}) == std::vector<bool>{true});
    CHECK(surface_mask(f.cells, f.occ, {&objects, true}) == std::vector<bool>{false});
  }
}

#include "morph/builtin.hpp"

#include <algorithm>
#include <cmath>

namespace morph {

std::vector<std::string> builtin_names() {
  return {"chain-50", "branch-150", "table-30x30", "grasp-8"};
}

std::optional<Scenario> builtin_scenario(std::string_view name) {
  if (name == "chain-50") return chain_scenario(50);
  if (name == "branch-150") return branch_scenario(150);
  if (name == "table-30x30") return table_scenario();
  if (name == "grasp-8") return grasp_scenario({0.0, 0.0, 1.0}, lattice_ball({0.0, 0.0, 7.0}, 1.5));
  return std::nullopt;
}

Scenario chain_scenario(int modules) {
  Scenario s;
  s.name = "chain-" + std::to_string(modules);
  s.behavior = BehaviorKind::Chain;
  s.blob = BlobSpec{modules, {0, 0, 0}, Mode::Sleep, {{0, Mode::Seed}}};
  s.rng_seed = 1;
  s.ticks = 20000;
  return s;
}

Scenario branch_scenario(int modules) {
  Scenario s;
  s.name = "branch-" + std::to_string(modules);
  s.behavior = BehaviorKind::Branch;
  s.params.node_threshold = 12;
  s.params.branch_count = 6;
  s.blob = BlobSpec{modules, {0, 0, 0}, Mode::Sleep, {{0, Mode::Node}}};
  s.rng_seed = 1;
  s.ticks = 10000;
  return s;
}

Scenario table_scenario() {
  Scenario s;
  s.name = "table-30x30";
  s.behavior = BehaviorKind::Adaptive;
  s.params.p_max = 0.05;
  s.params.p_min = 0.05;
  s.params.f_max = 2.0;
  s.params.f_min = 1.0;
  BoardSpec board;
  board.board = Board{4, 30, 30, 3, 1};
  board.reservoir = BoardRect{14, 0, 16, 30};
  s.board = board;
  s.regions = {{1, {0, 0, 15, 30}, 10.0}, {2, {15, 0, 30, 30}, 0.0}};
  s.weight_schedule = {{500, 2, 10.0}};
  s.flags.ground = true;
  s.flags.conserve_weight = true;
  s.scent_cap = 64;
  s.rng_seed = 1;
  s.ticks = 2000;
  return s;
}

std::vector<CellCoord> lattice_ball(const Vec3& center, double radius) {
  std::vector<CellCoord> out;
  const int r = static_cast<int>(std::ceil(radius)) + 1;
  const int cx = static_cast<int>(std::lround(center.x));
  const int cy = static_cast<int>(std::lround(center.y));
  const int cz = static_cast<int>(std::lround(center.z));
  for (int x = cx - r; x <= cx + r; ++x) {
    for (int y = cy - r; y <= cy + r; ++y) {
      for (int z = cz - r; z <= cz + r; ++z) {
        const CellCoord c{x, y, z};
        if (!has_lattice_parity(c)) continue;
        const double dx = x - center.x;
        const double dy = y - center.y;
        const double dz = z - center.z;
        if (dx * dx + dy * dy + dz * dz <= radius * radius) out.push_back(c);
      }
    }
  }
  return out;
}

Scenario grasp_scenario(const Vec3& bias, std::vector<CellCoord> object) {
  Scenario s;
  s.name = "grasp-8";
  s.behavior = BehaviorKind::Grasp;
  s.params.bias = bias;
  constexpr int kHalf = 5;
  const std::vector<CellCoord> seeds{{-2, 0, 0}, {2, 0, 0},  {0, -2, 0}, {0, 2, 0},
                                     {-1, -1, 0}, {1, 1, 0}, {-1, 1, 0}, {1, -1, 0}};
  for (int z = -1; z <= 0; ++z) {
    for (int x = -kHalf; x <= kHalf; ++x) {
      for (int y = -kHalf; y <= kHalf; ++y) {
        const CellCoord c{x, y, z};
        if (!has_lattice_parity(c)) continue;
        const bool seed = std::find(seeds.begin(), seeds.end(), c) != seeds.end();
        s.modules.push_back({c, seed ? Mode::Seed : Mode::Sleep, {}});
      }
    }
  }
  s.objects = std::move(object);
  s.rng_seed = 1;
  s.ticks = 4000;
  return s;
}

}  // namespace morph

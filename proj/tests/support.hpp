#pragma once

// Shared fixtures for the unit tests.

#include <algorithm>
#include <vector>

#include "morph/engine.hpp"
#include "morph/rng.hpp"

namespace morph::test {

/// All 12 permutations of (+-1, +-1, 0), built without the library table.
inline std::vector<CellCoord> offsets_from_definition() {
  std::vector<CellCoord> out;
  for (int a : {-1, 1}) {
    for (int b : {-1, 1}) {
      out.push_back({a, b, 0});
      out.push_back({a, 0, b});
      out.push_back({0, a, b});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Random connected set of lattice cells grown from the origin.
inline std::vector<CellCoord> random_blob(Rng& rng, std::size_t n, bool ground = false) {
  const auto offs = offsets_from_definition();
  std::vector<CellCoord> cells{{0, 0, 0}};
  CellSet set{cells[0]};
  while (cells.size() < n) {
    const auto base = cells[rng.uniform_index(cells.size())];
    const auto c = base + offs[rng.uniform_index(offs.size())];
    if (set.contains(c) || (ground && c.z < 0)) continue;
    set.insert(c);
    cells.push_back(c);
  }
  return cells;
}

/// World over explicit (cell, mode) pairs, indexed and ready to tick.
inline World make_world(BehaviorKind kind, const std::vector<std::pair<CellCoord, Mode>>& mods) {
  World w;
  w.behavior = kind;
  for (const auto& [cell, mode] : mods) {
    ModuleRecord m;
    m.cell = cell;
    m.mode = mode;
    w.modules.push_back(m);
  }
  index_world(w);
  return w;
}

}  // namespace morph::test

#include "morph/graph.hpp"

#include <algorithm>

namespace morph {

Adjacency build_adjacency(std::span<const CellCoord> cells, const OccupancyMap& occupancy) {
  Adjacency graph(cells.size());
  for (std::size_t id = 0; id < cells.size(); ++id) {
    for (const auto& o : kFaceOffsets) {
      if (auto it = occupancy.find(cells[id] + o); it != occupancy.end()) {
        graph[id].push_back(it->second);
      }
    }
  }
  return graph;
}

bool is_connected(const Adjacency& graph, const std::vector<bool>& removed) {
  const auto n = graph.size();
  auto gone = [&](std::size_t v) { return !removed.empty() && removed[v]; };
  std::size_t start = n;
  std::size_t alive = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (gone(v)) continue;
    ++alive;
    if (start == n) start = v;
  }
  if (alive <= 1) return true;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto w : graph[v]) {
      const auto u = static_cast<std::size_t>(w);
      if (seen[u] || gone(u)) continue;
      seen[u] = true;
      ++reached;
      stack.push_back(u);
    }
  }
  return reached == alive;
}

std::vector<bool> articulation_points(const Adjacency& graph) {
  const auto n = graph.size();
  std::vector<bool> cut(n, false);
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<int> parent(n, -1);
  std::vector<std::size_t> edge_pos(n, 0);
  int timer = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (disc[root] != -1) continue;
    int root_children = 0;
    std::vector<std::size_t> stack{root};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      const auto v = stack.back();
      if (edge_pos[v] < graph[v].size()) {
        const auto w = static_cast<std::size_t>(graph[v][edge_pos[v]++]);
        if (disc[w] == -1) {
          parent[w] = static_cast<int>(v);
          disc[w] = low[w] = timer++;
          if (v == root) ++root_children;
          stack.push_back(w);
        } else if (static_cast<int>(w) != parent[v]) {
          low[v] = std::min(low[v], disc[w]);
        }
        continue;
      }
      stack.pop_back();
      if (parent[v] >= 0) {
        const auto p = static_cast<std::size_t>(parent[v]);
        low[p] = std::min(low[p], low[v]);
        if (p != root && low[v] >= disc[p]) cut[p] = true;
      }
    }
    if (root_children > 1) cut[root] = true;
  }
  return cut;
}

}  // namespace morph

#include "morph/scent.hpp"

#include <algorithm>
#include <deque>
#include <queue>

namespace morph {

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::Regular: return "regular";
    case Channel::Node: return "node";
  }
  return "?";
}

std::string_view to_string(ScentRole r) {
  switch (r) {
    case ScentRole::Emit: return "emit";
    case ScentRole::Propagate: return "propagate";
    case ScentRole::Inert: return "inert";
  }
  return "?";
}

std::vector<std::uint32_t> step_channel(const Adjacency& graph,
                                        std::span<const std::uint32_t> previous,
                                        std::span<const ScentRole> roles, std::uint32_t cap) {
  std::vector<std::uint32_t> next(previous.begin(), previous.end());
  for (std::size_t v = 0; v < graph.size(); ++v) {
    switch (roles[v]) {
      case ScentRole::Emit:
        next[v] = 0;
        break;
      case ScentRole::Inert:
        break;
      case ScentRole::Propagate: {
        if (graph[v].empty()) break;
        std::uint32_t best = cap;
        for (auto w : graph[v]) best = std::min(best, previous[static_cast<std::size_t>(w)]);
        next[v] = best >= cap ? cap : best + 1;
        break;
      }
    }
  }
  return next;
}

std::vector<std::uint32_t> distance_oracle(const Adjacency& graph,
                                           std::span<const ModuleId> emitters,
                                           std::uint32_t cap) {
  std::vector<std::uint32_t> dist(graph.size(), cap);
  std::deque<std::size_t> queue;
  for (auto e : emitters) {
    const auto v = static_cast<std::size_t>(e);
    if (dist[v] == 0) continue;
    dist[v] = 0;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto w : graph[v]) {
      const auto u = static_cast<std::size_t>(w);
      if (dist[u] != cap || dist[v] + 1 >= cap) continue;
      dist[u] = dist[v] + 1;
      queue.push_back(u);
    }
  }
  return dist;
}

std::vector<std::uint32_t> settle_channel(const Adjacency& graph,
                                          std::span<const std::uint32_t> previous,
                                          std::span<const ScentRole> roles, std::uint32_t cap) {
  const auto n = graph.size();
  std::vector<std::uint32_t> value(n, cap);
  using Entry = std::pair<std::uint32_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  for (std::size_t v = 0; v < n; ++v) {
    if (roles[v] == ScentRole::Emit) {
      value[v] = 0;
    } else if (roles[v] == ScentRole::Inert || graph[v].empty()) {
      value[v] = previous[v];
    } else {
      continue;
    }
    if (value[v] < cap) frontier.emplace(value[v], v);
  }
  while (!frontier.empty()) {
    const auto [d, v] = frontier.top();
    frontier.pop();
    if (d != value[v]) continue;
    for (auto w : graph[v]) {
      const auto u = static_cast<std::size_t>(w);
      if (roles[u] != ScentRole::Propagate) continue;
      const std::uint32_t candidate = std::min(cap, d + 1);
      if (candidate < value[u]) {
        value[u] = candidate;
        frontier.emplace(candidate, u);
      }
    }
  }
  return value;
}

std::vector<bool> surface_mask(std::span<const CellCoord> cells, const OccupancyMap& occupancy,
                               const Terrain& terrain) {
  std::vector<bool> mask(cells.size(), false);
  for (std::size_t v = 0; v < cells.size(); ++v) {
    for (const auto& c : neighbors(cells[v])) {
      if (!occupancy.contains(c) && !terrain.is_object(c) && !terrain.below_ground(c)) {
        mask[v] = true;
        break;
      }
    }
  }
  return mask;
}

}  // namespace morph

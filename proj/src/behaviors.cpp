#include "morph/behaviors.hpp"

#include <algorithm>
#include <limits>

namespace morph {

namespace {

constexpr std::size_t ch(Channel c) { return static_cast<std::size_t>(c); }

template <class T>
const T& pick(const std::vector<T>& items, Rng& rng) {
  return items[rng.uniform_index(items.size())];
}

std::vector<std::size_t> free_slots(const LocalView& view, std::uint16_t excluded = 0) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < kFaceCount; ++s) {
    if (view.free[s] && (excluded & (1u << s)) == 0) out.push_back(s);
  }
  return out;
}

bool is_recruit(const std::optional<NeighborInfo>& n) {
  return n && (n->mode == Mode::Search || n->mode == Mode::Sleep);
}

/// Seed handoff shared by the chain and branch behaviors: choose a growth
/// direction once, then pass seedhood to whoever arrives there.
Action seed_handoff(const LocalView& view, Rng& rng) {
  Action act;
  if (!view.memory.growth) {
    const auto options = free_slots(view);
    if (options.empty()) return act;
    Memory mem = view.memory;
    mem.growth = static_cast<std::uint8_t>(pick(options, rng));
    act.memory = mem;
    return act;
  }
  const std::size_t slot = *view.memory.growth;
  if (is_recruit(view.neighbors[slot])) {
    act.writes.push_back({slot, Mode::Seed, view.memory.growth});
    act.mode = Mode::Final;
  }
  return act;
}

std::vector<std::size_t> neighbors_in(const LocalView& view, std::initializer_list<Mode> modes) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < kFaceCount; ++s) {
    const auto& n = view.neighbors[s];
    if (n && std::find(modes.begin(), modes.end(), n->mode) != modes.end()) out.push_back(s);
  }
  return out;
}

void disband_neighbors(const LocalView& view, Action& act) {
  for (auto s : neighbors_in(view, {Mode::Final, Mode::Seed})) {
    act.writes.push_back({s, Mode::Disband, std::nullopt});
  }
}

}  // namespace

std::string_view to_string(BehaviorKind k) {
  switch (k) {
    case BehaviorKind::Chain: return "chain";
    case BehaviorKind::Branch: return "branch";
    case BehaviorKind::Adaptive: return "adaptive";
    case BehaviorKind::Grasp: return "grasp";
  }
  return "?";
}

std::optional<BehaviorKind> parse_behavior(std::string_view name) {
  for (auto k : {BehaviorKind::Chain, BehaviorKind::Branch, BehaviorKind::Adaptive,
                 BehaviorKind::Grasp}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool LocalView::scent_detected(Channel c) const {
  return std::any_of(neighbors.begin(), neighbors.end(),
                     [&](const auto& n) { return n && n->scent[ch(c)] < cap; });
}

std::size_t channel_count(BehaviorKind kind) { return kind == BehaviorKind::Branch ? 2 : 1; }

ScentRole scent_role(BehaviorKind kind, Mode mode, Channel channel) {
  if (mode == Mode::Sleep) return ScentRole::Inert;
  if (ch(channel) >= channel_count(kind)) return ScentRole::Inert;
  switch (kind) {
    case BehaviorKind::Chain:
      return mode == Mode::Seed ? ScentRole::Emit : ScentRole::Propagate;
    case BehaviorKind::Branch:
      if (channel == Channel::Regular) {
        return (mode == Mode::Seed || mode == Mode::Node) ? ScentRole::Emit
                                                          : ScentRole::Propagate;
      }
      return (mode == Mode::Node || mode == Mode::INode) ? ScentRole::Emit
                                                         : ScentRole::Propagate;
    case BehaviorKind::Adaptive:
      return (mode == Mode::ARoot || mode == Mode::Seed) ? ScentRole::Emit
                                                         : ScentRole::Propagate;
    case BehaviorKind::Grasp:
      return (mode == Mode::Seed || mode == Mode::TouchSeed) ? ScentRole::Emit
                                                             : ScentRole::Propagate;
  }
  return ScentRole::Inert;
}

bool mode_allowed(BehaviorKind kind, Mode mode) {
  switch (kind) {
    case BehaviorKind::Chain:
      return mode == Mode::Sleep || mode == Mode::Search || mode == Mode::Seed ||
             mode == Mode::Final;
    case BehaviorKind::Branch:
      return mode_allowed(BehaviorKind::Chain, mode) || mode == Mode::Node ||
             mode == Mode::INode;
    case BehaviorKind::Adaptive:
      return mode_allowed(BehaviorKind::Chain, mode) || mode == Mode::Fixed ||
             is_root(mode) || mode == Mode::Disband;
    case BehaviorKind::Grasp:
      return mode_allowed(BehaviorKind::Chain, mode) || mode == Mode::Touch ||
             mode == Mode::TouchSeed;
  }
  return false;
}

std::optional<MoveCandidate> gradient_move(const LocalView& view, Channel channel, Rng& rng) {
  if (view.moves.empty()) return std::nullopt;
  const auto c = ch(channel);
  std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
  for (const auto& m : view.moves) best = std::min(best, m.dst_min[c]);
  if (best >= view.scent[c]) return random_move(view, rng);
  std::vector<MoveCandidate> ties;
  for (const auto& m : view.moves) {
    if (m.dst_min[c] == best) ties.push_back(m.move);
  }
  return pick(ties, rng);
}

std::optional<MoveCandidate> random_move(const LocalView& view, Rng& rng) {
  if (view.moves.empty()) return std::nullopt;
  return view.moves[rng.uniform_index(view.moves.size())].move;
}

Action chain_step(const LocalView& view, const BehaviorParams& params, Rng& rng) {
  Action act;
  switch (view.mode) {
    case Mode::Sleep:
      if (view.scent_detected(Channel::Regular)) {
        act.mode = Mode::Search;
      } else if (params.seed_wake_probability > 0.0 &&
                 rng.bernoulli(params.seed_wake_probability)) {
        act.mode = Mode::Seed;
      }
      break;
    case Mode::Search:
      act.move = gradient_move(view, Channel::Regular, rng);
      break;
    case Mode::Seed:
      return seed_handoff(view, rng);
    default:
      break;
  }
  return act;
}

Action branch_step(const LocalView& view, const BehaviorParams& params, Rng& rng) {
  Action act;
  switch (view.mode) {
    case Mode::Sleep:
      if (view.scent_detected(Channel::Regular)) act.mode = Mode::Search;
      break;
    case Mode::Search:
      act.move = gradient_move(view, Channel::Regular, rng);
      break;
    case Mode::Seed:
      return seed_handoff(view, rng);
    case Mode::Final:
      if (view.scent[ch(Channel::Node)] > static_cast<std::uint32_t>(params.node_threshold)) {
        act.mode = Mode::Node;
      }
      break;
    case Mode::Node: {
      Memory mem = view.memory;
      if (mem.spawned >= params.branch_count) {
        act.mode = Mode::INode;
        break;
      }
      if (mem.target) {
        const std::size_t slot = *mem.target;
        const auto& n = view.neighbors[slot];
        if (is_recruit(n)) {
          act.writes.push_back({slot, Mode::Seed, mem.target});
          mem.used_directions |= static_cast<std::uint16_t>(1u << slot);
          ++mem.spawned;
          mem.target.reset();
          act.memory = mem;
          if (mem.spawned >= params.branch_count) act.mode = Mode::INode;
          break;
        }
        if (n) mem.target.reset();
      }
      if (!mem.target) {
        const auto options = free_slots(view, mem.used_directions);
        if (!options.empty()) mem.target = static_cast<std::uint8_t>(pick(options, rng));
      }
      if (!(mem == view.memory)) act.memory = mem;
      break;
    }
    default:
      break;
  }
  return act;
}

Action adaptive_step(const LocalView& view, const BehaviorParams& params, Rng& rng) {
  Action act;
  switch (view.mode) {
    case Mode::IRoot:
      if (view.region_load > params.f_max && rng.bernoulli(params.p_max)) act.mode = Mode::ARoot;
      break;
    case Mode::Root:
      if (view.region_load < params.f_min && rng.bernoulli(params.p_min)) {
        disband_neighbors(view, act);
        act.mode = Mode::IRoot;
      }
      break;
    case Mode::Sleep:
      if (view.scent_detected(Channel::Regular)) act.mode = Mode::Search;
      break;
    case Mode::Search: {
      std::vector<std::size_t> anchors;
      for (auto s : neighbors_in(view, {Mode::Seed, Mode::ARoot})) {
        // We must sit on the ground side of the anchor.
        if (kFaceOffsets[s].z > 0) anchors.push_back(s);
      }
      if (!anchors.empty()) {
        const auto s = pick(anchors, rng);
        const Mode promoted = view.neighbors[s]->mode == Mode::Seed ? Mode::Final : Mode::Root;
        act.writes.push_back({s, promoted, std::nullopt});
        act.mode = Mode::Seed;
        break;
      }
      // Nothing to search for: rest until a scent reaches us.
      if (view.scent[ch(Channel::Regular)] >= view.cap && !view.scent_detected(Channel::Regular)) {
        break;
      }
      act.move = gradient_move(view, Channel::Regular, rng);
      break;
    }
    case Mode::Seed:
      if (view.touches_ground) act.mode = Mode::Final;
      break;
    case Mode::Disband:
      disband_neighbors(view, act);
      act.mode = Mode::Search;
      break;
    default:
      break;
  }
  return act;
}

Action grasp_step(const LocalView& view, const BehaviorParams& params, Rng& rng) {
  Action act;
  switch (view.mode) {
    case Mode::Sleep:
      if (view.scent_detected(Channel::Regular)) act.mode = Mode::Search;
      break;
    case Mode::Search: {
      const auto seeds = neighbors_in(view, {Mode::Seed, Mode::TouchSeed});
      if (seeds.empty()) {
        act.move = gradient_move(view, Channel::Regular, rng);
        break;
      }
      const auto s = pick(seeds, rng);
      if (view.touches_object) {
        act.writes.push_back({s, Mode::Touch, std::nullopt});
        act.mode = Mode::TouchSeed;
        break;
      }
      if (view.neighbors[s]->mode == Mode::Seed) {
        const CellCoord seed_cell = view.cell + kFaceOffsets[s];
        if (dot(view.cell - seed_cell, params.bias) > 0.0) {
          act.writes.push_back({s, Mode::Final, std::nullopt});
          act.mode = Mode::Seed;
          break;
        }
        std::vector<MoveCandidate> spots;
        for (const auto& m : view.moves) {
          const auto rel = m.move.dst - seed_cell;
          if (is_face_offset(rel) && dot(rel, params.bias) > 0.0) spots.push_back(m.move);
        }
        if (!spots.empty()) {
          act.move = pick(spots, rng);
          break;
        }
      }
      act.move = random_move(view, rng);
      break;
    }
    default:
      break;
  }
  return act;
}

Action behavior_step(BehaviorKind kind, const LocalView& view, const BehaviorParams& params,
                     Rng& rng) {
  switch (kind) {
    case BehaviorKind::Chain: return chain_step(view, params, rng);
    case BehaviorKind::Branch: return branch_step(view, params, rng);
    case BehaviorKind::Adaptive: return adaptive_step(view, params, rng);
    case BehaviorKind::Grasp: return grasp_step(view, params, rng);
  }
  return {};
}

}  // namespace morph

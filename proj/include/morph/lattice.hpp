#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace morph {

/// Integer coordinate of one module-sized cell. Module centers of a
/// rhombic-dodecahedral packing sit on the FCC lattice, i.e. the integer
/// triples with an even coordinate sum.
struct CellCoord {
  int x = 0;
  int y = 0;
  int z = 0;

  friend constexpr auto operator<=>(const CellCoord&, const CellCoord&) = default;

  constexpr CellCoord operator+(CellCoord o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr CellCoord operator-(CellCoord o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr CellCoord operator-() const { return {-x, -y, -z}; }
};

/// Displacement between face-neighbor cells: a permutation of (+-1, +-1, 0).
using Offset = CellCoord;

constexpr int dot(CellCoord a, CellCoord b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr bool has_lattice_parity(CellCoord c) { return ((c.x + c.y + c.z) & 1) == 0; }

inline constexpr std::size_t kFaceCount = 12;

/// The twelve face offsets in lexicographic order. Slot indices into this
/// table are used everywhere a direction is stored.
inline constexpr std::array<Offset, kFaceCount> kFaceOffsets{{
    {-1, -1, 0}, {-1, 0, -1}, {-1, 0, 1}, {-1, 1, 0},
    {0, -1, -1}, {0, -1, 1},  {0, 1, -1}, {0, 1, 1},
    {1, -1, 0},  {1, 0, -1},  {1, 0, 1},  {1, 1, 0},
}};

static_assert([] {
  for (std::size_t i = 0; i < kFaceCount; ++i) {
    if (kFaceOffsets[i] != -kFaceOffsets[kFaceCount - 1 - i]) return false;
  }
  return true;
}(), "opposite faces must occupy mirrored slots");

/// Slot of `o` in kFaceOffsets, or nullopt if `o` is not a face offset.
std::optional<std::size_t> face_slot(Offset o);

bool is_face_offset(Offset o);

struct CellHash {
  std::size_t operator()(const CellCoord& c) const noexcept {
    auto h = static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x));
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(c.y);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(c.z);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

using CellSet = std::unordered_set<CellCoord, CellHash>;

using ModuleId = std::int32_t;
using OccupancyMap = std::unordered_map<CellCoord, ModuleId, CellHash>;

/// Real-valued direction used for directed random motion.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(CellCoord a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

/// A legal 120 degree roll of the module at `src` over the module at `pivot`
/// onto the cell `dst`.
struct MoveCandidate {
  CellCoord src;
  CellCoord pivot;
  CellCoord dst;

  friend constexpr auto operator<=>(const MoveCandidate&, const MoveCandidate&) = default;
};

/// Non-module constraints on where a module may be: obstacle/object cells
/// and an optional ground plane at z = 0.
struct Terrain {
  const CellSet* objects = nullptr;
  bool ground = false;

  bool is_object(CellCoord c) const { return objects != nullptr && objects->contains(c); }
  bool below_ground(CellCoord c) const { return ground && c.z < 0; }
};

std::array<CellCoord, kFaceCount> neighbors(CellCoord cell);

/// Two faces of one module share an edge iff their offsets have dot product 1.
constexpr bool face_adjacent(Offset u, Offset v) { return dot(u, v) == 1; }

/// The four slots edge-adjacent to `slot`.
const std::array<std::size_t, 4>& adjacent_faces(std::size_t slot);

/// Cell swept by a roll from pivot+u to pivot+v; must be empty for the roll.
constexpr CellCoord transit_corner(const MoveCandidate& m) {
  return m.pivot + (m.src - m.pivot) + (m.dst - m.pivot);
}

/// Every legal roll of the module at `src`, ordered by (pivot, dst).
/// `occupied(c)` reports whether a module sits at `c`.
template <class Occupied>
std::vector<MoveCandidate> enumerate_moves(const Occupied& occupied, CellCoord src,
                                           const Terrain& terrain) {
  if (!occupied(src)) {
    throw std::invalid_argument("enumerate_moves: source cell is not occupied");
  }
  std::vector<MoveCandidate> out;
  for (std::size_t a = 0; a < kFaceCount; ++a) {
    const CellCoord pivot = src + kFaceOffsets[a];
    if (!occupied(pivot)) continue;
    // src sits on the pivot's face opposite to offset a.
    const std::size_t from = kFaceCount - 1 - a;
    for (std::size_t to : adjacent_faces(from)) {
      const MoveCandidate m{src, pivot, pivot + kFaceOffsets[to]};
      if (occupied(m.dst) || terrain.is_object(m.dst) || terrain.below_ground(m.dst)) continue;
      const CellCoord corner = transit_corner(m);
      if (occupied(corner) || terrain.is_object(corner)) continue;
      out.push_back(m);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<MoveCandidate> enumerate_moves(const CellSet& occupied, CellCoord src,
                                           const Terrain& terrain = {});

/// Moves whose displacement has a strictly positive projection on `bias`.
std::vector<MoveCandidate> filter_directed(const std::vector<MoveCandidate>& moves,
                                           const Vec3& bias);

}  // namespace morph

#include "morph/lattice.hpp"

namespace morph {

namespace {

constexpr std::array<std::array<std::size_t, 4>, kFaceCount> build_adjacency_table() {
  std::array<std::array<std::size_t, 4>, kFaceCount> table{};
  for (std::size_t u = 0; u < kFaceCount; ++u) {
    std::size_t n = 0;
    for (std::size_t v = 0; v < kFaceCount; ++v) {
      if (face_adjacent(kFaceOffsets[u], kFaceOffsets[v])) table[u][n++] = v;
    }
  }
  return table;
}

constexpr auto kAdjacentFaces = build_adjacency_table();

}  // namespace

std::optional<std::size_t> face_slot(Offset o) {
  const auto it = std::lower_bound(kFaceOffsets.begin(), kFaceOffsets.end(), o);
  if (it == kFaceOffsets.end() || *it != o) return std::nullopt;
  return static_cast<std::size_t>(it - kFaceOffsets.begin());
}

bool is_face_offset(Offset o) { return face_slot(o).has_value(); }

std::array<CellCoord, kFaceCount> neighbors(CellCoord cell) {
  std::array<CellCoord, kFaceCount> out;
  for (std::size_t i = 0; i < kFaceCount; ++i) out[i] = cell + kFaceOffsets[i];
  return out;
}

const std::array<std::size_t, 4>& adjacent_faces(std::size_t slot) { return kAdjacentFaces.at(slot); }

std::vector<MoveCandidate> enumerate_moves(const CellSet& occupied, CellCoord src,
                                           const Terrain& terrain) {
  return enumerate_moves([&](CellCoord c) { return occupied.contains(c); }, src, terrain);
}

std::vector<MoveCandidate> filter_directed(const std::vector<MoveCandidate>& moves,
                                           const Vec3& bias) {
  std::vector<MoveCandidate> out;
  for (const auto& m : moves) {
    if (dot(m.dst - m.src, bias) > 0.0) out.push_back(m);
  }
  return out;
}

}  // namespace morph

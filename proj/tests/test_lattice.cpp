#include <set>

#include "doctest.h"
#include "morph/lattice.hpp"
#include "support.hpp"

using namespace morph;

namespace {

/// Rules (a)-(e) applied literally over every (pivot offset, dst offset) pair.
std::set<MoveCandidate> brute_force_moves(const CellSet& occ, CellCoord src, const CellSet& objects,
                                          bool ground) {
  const auto offs = test::offsets_from_definition();
  std::set<MoveCandidate> out;
  for (const auto& p : offs) {
    const CellCoord pivot = src + p;
    if (!occ.contains(pivot)) continue;
    for (const auto& q : offs) {
      const CellCoord dst = pivot + q;
      const CellCoord u = src - pivot;
      const CellCoord v = dst - pivot;
      if (u.x * v.x + u.y * v.y + u.z * v.z != 1) continue;
      if (occ.contains(dst) || objects.contains(dst)) continue;
      if (ground && dst.z < 0) continue;
      const CellCoord corner = pivot + u + v;
      if (occ.contains(corner) || objects.contains(corner)) continue;
      out.insert({src, pivot, dst});
    }
  }
  return out;
}

int sq(CellCoord c) { return dot(c, c); }

}  // namespace

TEST_CASE("face offsets are the twelve permutations of (+-1, +-1, 0)") {
  const auto expected = test::offsets_from_definition();
  REQUIRE(expected.size() == 12);
  CHECK(std::vector<CellCoord>(kFaceOffsets.begin(), kFaceOffsets.end()) == expected);
  for (std::size_t i = 0; i < kFaceCount; ++i) {
    CHECK(face_slot(kFaceOffsets[i]) == i);
    CHECK(has_lattice_parity(kFaceOffsets[i]));
  }
  CHECK_FALSE(face_slot({1, 1, 1}).has_value());
  CHECK_FALSE(is_face_offset({2, 0, 0}));
}

TEST_CASE("neighbors") {
  const auto n0 = neighbors({0, 0, 0});
  CHECK(std::set<CellCoord>(n0.begin(), n0.end()).size() == 12);
  for (const auto& c : n0) CHECK(is_face_offset(c));

  const auto n2 = neighbors({2, 0, 0});
  CHECK(std::find(n2.begin(), n2.end(), CellCoord{3, 1, 0}) != n2.end());
  CHECK(std::find(n2.begin(), n2.end(), CellCoord{1, -1, 0}) != n2.end());

  SUBCASE("face neighbors share exactly four neighbors") {
    for (const auto& o : kFaceOffsets) {
      const auto a = neighbors({0, 0, 0});
      const auto b = neighbors(o);
      std::set<CellCoord> sa(a.begin(), a.end());
      int common = 0;
      for (const auto& c : b) common += sa.contains(c) ? 1 : 0;
      CHECK(common == 4);
    }
  }
  SUBCASE("parity closure") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      CellCoord c{static_cast<int>(rng.uniform_index(41)) - 20,
                  static_cast<int>(rng.uniform_index(41)) - 20, 0};
      c.z = (c.x + c.y) & 1;
      for (const auto& n : neighbors(c)) CHECK(has_lattice_parity(n));
    }
  }
}

TEST_CASE("face adjacency") {
  CHECK(face_adjacent({1, 1, 0}, {1, 0, 1}));
  CHECK_FALSE(face_adjacent({1, 1, 0}, {-1, -1, 0}));
  for (std::size_t s = 0; s < kFaceCount; ++s) {
    int count = 0;
    for (const auto& v : kFaceOffsets) count += face_adjacent(kFaceOffsets[s], v) ? 1 : 0;
    CHECK(count == 4);
    for (auto t : adjacent_faces(s)) CHECK(dot(kFaceOffsets[s], kFaceOffsets[t]) == 1);
  }
}

TEST_CASE("enumerate_moves examples") {
  SUBCASE("two modules") {
    const CellSet occ{{0, 0, 0}, {1, 1, 0}};
    const auto moves = enumerate_moves(occ, {1, 1, 0});
    std::set<CellCoord> dsts;
    for (const auto& m : moves) {
      CHECK(m.pivot == CellCoord{0, 0, 0});
      dsts.insert(m.dst);
    }
    CHECK(dsts == std::set<CellCoord>{{1, 0, 1}, {1, 0, -1}, {0, 1, 1}, {0, 1, -1}});

    const CellSet none;
    const auto grounded = enumerate_moves(occ, {1, 1, 0}, Terrain{&none, true});
    CHECK(grounded.size() == 2);

    const auto up = filter_directed(moves, {0, 0, 1});
    std::set<CellCoord> up_dsts;
    for (const auto& m : up) up_dsts.insert(m.dst);
    CHECK(up_dsts == std::set<CellCoord>{{1, 0, 1}, {0, 1, 1}});
    CHECK(filter_directed(up, {1, 1, 1}).empty());
    const Vec3 own{static_cast<double>(moves[0].dst.x - moves[0].src.x),
                   static_cast<double>(moves[0].dst.y - moves[0].src.y),
                   static_cast<double>(moves[0].dst.z - moves[0].src.z)};
    const auto self = filter_directed(moves, own);
    CHECK(std::find(self.begin(), self.end(), moves[0]) != self.end());
  }
  SUBCASE("isolated module cannot roll") {
    const CellSet occ{{0, 0, 0}};
    CHECK(enumerate_moves(occ, {0, 0, 0}).empty());
  }
  SUBCASE("end of a straight chain rolls only over its one neighbor") {
    const CellSet occ{{0, 0, 0}, {1, 1, 0}, {2, 2, 0}, {3, 3, 0}};
    const auto moves = enumerate_moves(occ, {3, 3, 0});
    CHECK_FALSE(moves.empty());
    for (const auto& m : moves) CHECK(m.pivot == CellCoord{2, 2, 0});
  }
  SUBCASE("transit corner blocks the roll") {
    // (2,1,1) is the corner of the roll from (1,1,0) to (1,0,1) over the origin.
    const CellSet occ{{0, 0, 0}, {1, 1, 0}, {2, 1, 1}};
    std::set<CellCoord> over_origin;
    for (const auto& m : enumerate_moves(occ, {1, 1, 0})) {
      if (m.pivot == CellCoord{0, 0, 0}) over_origin.insert(m.dst);
    }
    CHECK(over_origin == std::set<CellCoord>{{1, 0, -1}, {0, 1, 1}, {0, 1, -1}});
  }
  SUBCASE("unoccupied source is an error") {
    const CellSet occ{{0, 0, 0}};
    CHECK_THROWS_AS(enumerate_moves(occ, {1, 1, 0}), std::invalid_argument);
  }
}

TEST_CASE("enumerate_moves equals the brute-force filter on random sets") {
  Rng rng(20240601);
  for (int trial = 0; trial < 300; ++trial) {
    const bool ground = trial % 3 == 0;
    const auto cells = test::random_blob(rng, 2 + rng.uniform_index(29), ground);
    const CellSet occ(cells.begin(), cells.end());
    CellSet objects;
    if (trial % 2 == 0) {
      for (const auto& c : test::random_blob(rng, 4)) {
        const CellCoord o = c + CellCoord{6, 0, 2};
        if (!occ.contains(o)) objects.insert(o);
      }
    }
    const Terrain terrain{&objects, ground};
    for (const auto& src : cells) {
      const auto moves = enumerate_moves(occ, src, terrain);
      CHECK(std::is_sorted(moves.begin(), moves.end()));
      const std::set<MoveCandidate> got(moves.begin(), moves.end());
      CHECK(got.size() == moves.size());
      CHECK(got == brute_force_moves(occ, src, objects, ground));
      for (const auto& m : moves) {
        CHECK(sq(m.src - m.pivot) == 2);
        CHECK(sq(m.dst - m.pivot) == 2);
        CHECK(sq(m.dst - m.src) == 2);
      }
    }
  }
}

TEST_CASE("enumerate_moves commutes with translations and the 48 lattice symmetries") {
  std::vector<std::array<int, 3>> perms{{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                        {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  auto apply = [](const std::array<int, 3>& p, const std::array<int, 3>& s, CellCoord c) {
    const int v[3] = {c.x, c.y, c.z};
    return CellCoord{s[0] * v[p[0]], s[1] * v[p[1]], s[2] * v[p[2]]};
  };
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cells = test::random_blob(rng, 12);
    const CellSet occ(cells.begin(), cells.end());
    const CellCoord shift{4, -2, 2};
    for (const auto& p : perms) {
      for (int signs = 0; signs < 8; ++signs) {
        const std::array<int, 3> s{signs & 1 ? -1 : 1, signs & 2 ? -1 : 1, signs & 4 ? -1 : 1};
        auto map = [&](CellCoord c) { return apply(p, s, c) + shift; };
        CellSet image;
        for (const auto& c : cells) image.insert(map(c));
        for (const auto& src : cells) {
          std::set<MoveCandidate> expected;
          for (const auto& m : enumerate_moves(occ, src)) {
            expected.insert({map(m.src), map(m.pivot), map(m.dst)});
          }
          const auto got = enumerate_moves(image, map(src));
          CHECK(std::set<MoveCandidate>(got.begin(), got.end()) == expected);
        }
      }
    }
  }
}

// Copyright 2026 The arraycache Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arraycache/chunk_index.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles/split_oracle.hpp"
#include "random_instances.hpp"

namespace arraycache {
namespace {

using testing::Points;
using testing::random_points;
using testing::random_query;

std::vector<std::uint32_t> all_rows(const CellSet& cs) {
  std::vector<std::uint32_t> rows(cs.size());
  std::iota(rows.begin(), rows.end(), 0u);
  return rows;
}

RawFileMeta meta_for(const CellSet& cs, FileId id = {}) {
  return RawFileMeta{id, cs.size(), cs.size() * 16, tight_box(cs)};
}

// Drives a FileChunking the way the coordinator does, keeping the rows of
// every live chunk.
struct Harness {
  explicit Harness(const Points& pts, std::uint64_t min_cells)
      : cells(testing::cells_of(pts)), chunking(meta_for(cells), 16, min_cells, ids.next()) {
    rows[chunking.chunks().begin()->first] = all_rows(cells);
  }

  RefineResult run(const QuerySpec& q) {
    std::map<ChunkId, std::vector<std::uint32_t>> input;
    for (ChunkId id : chunking.overlapping(q.range)) input[id] = rows.at(id);
    auto r = chunking.refine(q, cells, input, ids);
    for (const auto& s : r.splits) rows.erase(s.parent);
    for (const auto& c : r.chunks) rows[c.summary.id] = c.rows;
    return r;
  }

  ChunkIdAllocator ids;
  CellSet cells;
  FileChunking chunking;
  std::map<ChunkId, std::vector<std::uint32_t>> rows;
};

bool has_box(const FileChunking& fc, const BoundingBox& b) {
  return std::any_of(fc.chunks().begin(), fc.chunks().end(), [&](const auto& kv) { return kv.second.box == b; });
}

TEST(OverlappingChunksTest, RootOnly) {
  Harness h({{2, 2}, {4, 5}}, 5);
  EXPECT_EQ(overlapping_chunks(h.chunking, testing::query(1, {1, 1}, {6, 8})), std::vector<ChunkId>{ChunkId{0}});
  EXPECT_TRUE(overlapping_chunks(h.chunking, testing::query(1, {5, 6}, {6, 8})).empty());
}

TEST(OverlappingChunksTest, SharedBudgetLayoutFindsFourChunks) {
  const testing::SharedBudgetLayout layout;
  const auto q = layout.query();
  std::set<FileId> hit;
  ChunkIdAllocator ids;
  for (const auto& f : layout.files()) {
    FileChunking fc(f.meta, layout.cell_bytes(), 5, ids.next());
    if (!overlapping_chunks(fc, q).empty()) hit.insert(f.meta.file_id);
  }
  using L = testing::SharedBudgetLayout;
  EXPECT_EQ(hit, (std::set<FileId>{L::kX1, L::kY1, L::kZ1, L::kZ2}));
}

TEST(SplitChunkTest, SmallChunkWithQueriedCellStaysWhole) {
  const CellSet cs = testing::cells_of({{2, 8}, {3, 9}, {5, 8}, {4, 10}});
  const auto rows = all_rows(cs);
  EXPECT_FALSE(split_chunk(cs, rows, tight_box(cs), testing::query(1, {4, 1}, {9, 9}), 5));
}

TEST(SplitChunkTest, SmallChunkWithoutQueriedCellSplits) {
  const CellSet cs = testing::cells_of({{8, 2}, {9, 1}, {8, 4}});
  const auto rows = all_rows(cs);
  const auto out = split_chunk(cs, rows, tight_box(cs), testing::query(1, {7, 3}, {10, 3}), 5);
  ASSERT_TRUE(out);
  EXPECT_EQ(out->dim, 1u);
  EXPECT_EQ(out->boundary, 3);
  EXPECT_EQ(out->lower_box, BoundingBox({8, 1}, {9, 2}));
  EXPECT_EQ(out->upper_box, BoundingBox({8, 4}, {8, 4}));
}

TEST(SplitChunkTest, CornerCellsSplitIntoTwoColumns) {
  const CellSet cs = testing::cells_of({{1, 1}, {1, 5}, {6, 1}, {6, 5}});
  const auto rows = all_rows(cs);
  const auto out = split_chunk(cs, rows, tight_box(cs), testing::query(1, {1, 1}, {2, 5}), 1);
  ASSERT_TRUE(out);
  EXPECT_EQ(out->lower_box, BoundingBox({1, 1}, {1, 5}));
  EXPECT_EQ(out->upper_box, BoundingBox({6, 1}, {6, 5}));
  EXPECT_EQ(volume(out->lower_box) + volume(out->upper_box), 10u);
}

TEST(SplitChunkTest, NoInteriorBoundaryKeepsChunk) {
  const CellSet cs = testing::cells_of({{2, 2}, {3, 3}});
  EXPECT_FALSE(split_chunk(cs, all_rows(cs), tight_box(cs), testing::query(1, {1, 1}, {6, 6}), 1));
}

TEST(SplitChunkTest, EmptySideCandidatesAreSkipped) {
  // A tight box always has cells on both sides of an interior boundary, so
  // this only arises for a box wider than its cells.
  const CellSet cs = testing::cells_of({{1, 1}, {5, 5}});
  const BoundingBox loose({1, 1}, {6, 6});
  EXPECT_FALSE(split_chunk(cs, all_rows(cs), loose, testing::query(1, {6, 1}, {6, 6}), 1));
}

TEST(SplitChunkTest, PreconditionsAreChecked) {
  const CellSet cs = testing::cells_of({{1, 1}, {5, 5}});
  EXPECT_THROW(split_chunk(cs, {}, tight_box(cs), testing::query(1, {1, 1}, {2, 2}), 1), PreconditionError);
  EXPECT_THROW(split_chunk(cs, all_rows(cs), tight_box(cs), testing::query(1, {7, 7}, {8, 8}), 1),
               PreconditionError);
}

TEST(RefineTest, DisjointQueryLeavesChunkingUnchanged) {
  Harness h({{2, 2}, {4, 5}}, 1);
  const auto r = h.run(testing::query(1, {8, 8}, {9, 9}));
  EXPECT_TRUE(r.chunks.empty());
  EXPECT_EQ(h.chunking.chunks().size(), 1u);
}

TEST(RefineTest, MissingCellsIsPreconditionError) {
  Harness h({{2, 2}, {4, 5}}, 1);
  ChunkIdAllocator ids(10);
  EXPECT_THROW(h.chunking.refine(testing::query(1, {1, 1}, {3, 3}), h.cells, {}, ids), PreconditionError);
}

TEST(RefineTest, EvolvingLayoutEndsWithFourChunks) {
  const testing::EvolvingChunkLayout layout;
  Harness h(layout.cells(), layout.kMinCells);
  const auto q = layout.queries();

  auto r1 = h.run(q[0]);
  ASSERT_EQ(r1.splits.size(), 1u);
  EXPECT_EQ(h.chunking.chunks().size(), 2u);
  EXPECT_TRUE(has_box(h.chunking, BoundingBox({2, 8}, {5, 10})));
  EXPECT_TRUE(has_box(h.chunking, BoundingBox({1, 1}, {9, 4})));

  auto r2 = h.run(q[1]);
  ASSERT_EQ(r2.splits.size(), 1u);
  EXPECT_EQ(h.chunking.chunks().size(), 3u);

  auto r3 = h.run(q[2]);
  ASSERT_EQ(r3.splits.size(), 1u);
  EXPECT_EQ(h.chunking.chunks().size(), 4u);
  // The third split cut a chunk holding no queried cell.
  for (const auto& c : r3.chunks) {
    for (auto row : c.rows) EXPECT_FALSE(q[2].range.contains(h.cells.coords(row)));
  }
  EXPECT_TRUE(has_box(h.chunking, BoundingBox({2, 8}, {5, 10})));
  EXPECT_TRUE(has_box(h.chunking, BoundingBox({1, 1}, {3, 3})));
  EXPECT_TRUE(has_box(h.chunking, BoundingBox({8, 1}, {9, 2})));
  EXPECT_TRUE(has_box(h.chunking, BoundingBox({8, 4}, {8, 4})));
}

// --- properties -----------------------------------------------------------

TEST(ChunkingProperties, PartitionTightnessDegreeAndShrinkage) {
  std::mt19937_64 rng(11);
  for (int instance = 0; instance < 60; ++instance) {
    const std::size_t rank = 2 + instance % 2;
    const Coord extent = 30;
    const auto pts = random_points(rng, 20 + instance * 3, extent, rank);
    Harness h(pts, 1 + instance % 12);
    for (std::uint64_t qid = 1; qid <= 15; ++qid) {
      const auto before = h.chunking.chunks();
      const auto q = random_query(rng, qid, extent, rank);
      const auto overlapping = h.chunking.overlapping(q.range).size();
      const auto r = h.run(q);
      ASSERT_LE(h.chunking.chunks().size(), before.size() + overlapping);

      std::vector<int> owner(h.cells.size(), 0);
      for (const auto& [id, c] : h.chunking.chunks()) {
        const auto& rows = h.rows.at(id);
        ASSERT_EQ(rows.size(), c.cell_count);
        ASSERT_EQ(tight_box(h.cells, rows), c.box);
        for (auto row : rows) {
          ++owner[row];
          ASSERT_TRUE(c.box.contains(h.cells.coords(row)));
        }
        if (c.parent && !before.count(id)) {
          ASSERT_TRUE(before.at(*c.parent).box.contains(c.box));
        }
      }
      for (int o : owner) ASSERT_EQ(o, 1);
      for (const auto& rc : r.chunks) ASSERT_EQ(rc.overlaps_query, intersects(rc.summary.box, q.range));
    }
  }
}

TEST(ChunkingProperties, RefineIsDeterministic) {
  std::mt19937_64 rng(5);
  const auto pts = random_points(rng, 200, 40, 2);
  Harness a(pts, 8), b(pts, 8);
  for (std::uint64_t qid = 1; qid <= 20; ++qid) {
    const auto q = random_query(rng, qid, 40, 2);
    a.run(q);
    b.run(q);
    ASSERT_EQ(a.rows, b.rows);
    ASSERT_EQ(a.chunking.split_history().size(), b.chunking.split_history().size());
  }
}

TEST(ChunkingProperties, SplitMatchesExhaustiveOracle) {
  std::mt19937_64 rng(3);
  int splits = 0;
  for (int i = 0; i < 400; ++i) {
    const std::size_t rank = 1 + i % 3;
    const auto pts = random_points(rng, 2 + i % 25, 12, rank);
    const CellSet cs = testing::cells_of(pts);
    const auto q = random_query(rng, 1, 12, rank);
    if (!intersects(tight_box(cs), q.range)) continue;
    const std::uint64_t min_cells = 1 + i % 30;
    const auto got = split_chunk(cs, all_rows(cs), tight_box(cs), q, min_cells);
    const auto want = oracle::best_split(pts, q.range, min_cells);
    ASSERT_EQ(got.has_value(), want.has_value()) << "instance " << i;
    if (!got) continue;
    ++splits;
    ASSERT_EQ(got->dim, want->dim);
    ASSERT_EQ(got->boundary, want->boundary);
    std::vector<std::uint32_t> lower(want->lower.begin(), want->lower.end());
    ASSERT_EQ(got->lower_rows, lower);
    ASSERT_EQ(volume(got->lower_box) + volume(got->upper_box), want->combined_volume);
  }
  EXPECT_GT(splits, 100);
}

}  // namespace
}  // namespace arraycache

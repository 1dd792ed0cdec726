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

#pragma once

// Small hand-built layouts shared by the unit and acceptance suites.

#include <cstdint>
#include <utility>
#include <vector>

#include "arraycache/array.hpp"
#include "arraycache/cluster.hpp"
#include "arraycache/ids.hpp"

namespace arraycache::testing {

using Points = std::vector<std::vector<Coord>>;

inline CellSet cells_of(const Points& pts, std::size_t attr_count = 0) {
  CellSet cs(pts.empty() ? 2 : pts.front().size(), attr_count);
  for (const auto& p : pts) cs.add(p);
  return cs;
}

inline RawFile raw_file(FileId id, const Points& pts, const ArraySchema& schema) {
  RawFile f;
  f.cells = cells_of(pts, schema.attr_count());
  f.meta.file_id = id;
  f.meta.cell_count = pts.size();
  f.meta.file_bytes = pts.size() * schema.cell_record_bytes();
  f.meta.box = tight_box(f.cells);
  return f;
}

inline QuerySpec query(std::uint64_t id, std::vector<Coord> lo, std::vector<Coord> hi, std::uint64_t radius = 1) {
  return QuerySpec{id, BoundingBox(std::move(lo), std::move(hi)), radius};
}

// Three nodes X, Y, Z holding seven files over a 6x8 array. A single
// similarity query over [1..5]x[2..4] touches seven cells spread over the
// first file of every node, and the second file of Z overlaps the query box
// without owning a queried cell.
struct SharedBudgetLayout {
  static constexpr NodeId kX{0};
  static constexpr NodeId kY{1};
  static constexpr NodeId kZ{2};
  static constexpr FileId kX1{kX, 0};
  static constexpr FileId kX2{kX, 1};
  static constexpr FileId kY1{kY, 0};
  static constexpr FileId kY2{kY, 1};
  static constexpr FileId kZ1{kZ, 0};
  static constexpr FileId kZ2{kZ, 1};
  static constexpr FileId kZ3{kZ, 2};

  ArraySchema schema{{{"i", 1, 6}, {"j", 1, 8}}, {}};
  std::uint64_t cell_bytes() const { return schema.cell_record_bytes(); }

  std::vector<RawFile> files() const {
    return {
        raw_file(kX1, {{2, 2}, {3, 3}, {3, 6}}, schema),
        raw_file(kX2, {{6, 7}, {5, 8}}, schema),
        raw_file(kY1, {{2, 3}, {2, 6}}, schema),
        raw_file(kY2, {{1, 8}, {2, 7}}, schema),
        raw_file(kZ1, {{1, 3}, {1, 4}, {4, 2}, {5, 2}}, schema),
        raw_file(kZ2, {{6, 1}, {1, 6}, {6, 5}}, schema),
        raw_file(kZ3, {{4, 7}, {6, 8}}, schema),
    };
  }

  QuerySpec query() const { return testing::query(1, {1, 2}, {5, 4}, 1); }

  // Queried cells and the cell pairs the join must bring together.
  static Points queried_cells() { return {{1, 3}, {1, 4}, {2, 2}, {2, 3}, {3, 3}, {4, 2}, {5, 2}}; }

  static std::vector<std::pair<std::vector<Coord>, std::vector<Coord>>> required_pairs() {
    return {{{1, 3}, {1, 4}}, {{1, 3}, {2, 3}}, {{2, 2}, {2, 3}}, {{2, 3}, {3, 3}}, {{4, 2}, {5, 2}}};
  }

  ClusterConfig config(std::uint64_t cells_per_node, Policy policy = Policy::kCost,
                       BudgetMode budgeting = BudgetMode::kDistributed) const {
    ClusterConfig c;
    c.nodes = 3;
    c.budget_per_node = cells_per_node * cell_bytes();
    c.min_cells = 5;
    c.policy = policy;
    c.budgeting = budgeting;
    c.record_trace = true;
    return c;
  }
};

// One file of ten cells on a 10x10 array and three queries that evolve its
// chunking: a volume-driven split, a split of one side, and finally a split
// of a chunk that overlaps the query box without holding a queried cell.
struct EvolvingChunkLayout {
  ArraySchema schema{{{"i", 1, 10}, {"j", 1, 10}}, {}};
  static constexpr std::uint64_t kMinCells = 5;

  static Points upper_cells() { return {{2, 8}, {3, 9}, {5, 8}, {4, 10}}; }
  static Points lower_cells() { return {{1, 1}, {2, 2}, {3, 3}, {8, 2}, {9, 1}, {8, 4}}; }

  static Points cells() {
    Points all = upper_cells();
    const auto lower = lower_cells();
    all.insert(all.end(), lower.begin(), lower.end());
    return all;
  }

  std::vector<QuerySpec> queries() const {
    return {testing::query(1, {6, 6}, {10, 10}, 0), testing::query(2, {4, 1}, {9, 9}, 0),
            testing::query(3, {7, 3}, {10, 3}, 0)};
  }
};

}  // namespace arraycache::testing

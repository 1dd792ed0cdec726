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

// Replays a single similarity query over seven small files on three nodes,
// once with a cluster-wide cache budget and once with per-node budgets, and
// prints where every cached chunk ends up.

#include <cstdio>
#include <string>
#include <vector>

#include "arraycache/cluster.hpp"

namespace {

using arraycache::ArraySchema;
using arraycache::BoundingBox;
using arraycache::BudgetMode;
using arraycache::CellSet;
using arraycache::Cluster;
using arraycache::ClusterConfig;
using arraycache::Coord;
using arraycache::FileId;
using arraycache::NodeId;
using arraycache::QuerySpec;
using arraycache::RawFile;

constexpr std::uint64_t kCellsPerNode = 3;

RawFile make_file(std::uint32_t node, std::uint32_t index, const std::vector<std::vector<Coord>>& pts,
                  const ArraySchema& schema) {
  RawFile f;
  f.cells = CellSet(2, 0);
  for (const auto& p : pts) f.cells.add(p);
  f.meta.file_id = FileId{NodeId{node}, index};
  f.meta.cell_count = pts.size();
  f.meta.file_bytes = pts.size() * schema.cell_record_bytes();
  f.meta.box = arraycache::tight_box(f.cells);
  return f;
}

std::string node_name(NodeId n) { return std::string(1, static_cast<char>('X' + arraycache::to_underlying(n))); }

void replay(const char* title, BudgetMode mode) {
  const ArraySchema schema({{"i", 1, 6}, {"j", 1, 8}}, {});
  const std::vector<RawFile> files = {
      make_file(0, 0, {{2, 2}, {3, 3}, {3, 6}}, schema),
      make_file(0, 1, {{6, 7}, {5, 8}}, schema),
      make_file(1, 0, {{2, 3}, {2, 6}}, schema),
      make_file(1, 1, {{1, 8}, {2, 7}}, schema),
      make_file(2, 0, {{1, 3}, {1, 4}, {4, 2}, {5, 2}}, schema),
      make_file(2, 1, {{6, 1}, {1, 6}, {6, 5}}, schema),
      make_file(2, 2, {{4, 7}, {6, 8}}, schema),
  };
  ClusterConfig config;
  config.nodes = 3;
  config.budget_per_node = kCellsPerNode * schema.cell_record_bytes();
  config.min_cells = 5;
  config.budgeting = mode;
  Cluster cluster(schema, files, config);

  const QuerySpec query{1, BoundingBox({1, 2}, {5, 4}), 1};
  const auto first = cluster.run_query(query);
  QuerySpec again = query;
  again.id = 2;
  const auto second = cluster.run_query(again);

  std::printf("%s\n", title);
  std::printf("  result cells: %llu\n", static_cast<unsigned long long>(first.result_cell_count));
  std::printf("  files scanned: %llu cold, %llu on repeat\n", static_cast<unsigned long long>(first.files_scanned),
              static_cast<unsigned long long>(second.files_scanned));
  for (const auto& [chunk, charges] : cluster.residency()) {
    const auto& s = cluster.chunk(chunk);
    std::printf("  chunk %s from file %s (%llu cells):", arraycache::to_string(chunk).c_str(),
                arraycache::to_string(s.file).c_str(), static_cast<unsigned long long>(s.cell_count));
    for (const auto& c : charges) {
      std::printf(" %s=%llu cells", node_name(c.node).c_str(),
                  static_cast<unsigned long long>(c.bytes / schema.cell_record_bytes()));
    }
    std::printf("\n");
  }
}

}  // namespace

int main() {
  replay("cluster-wide budget", BudgetMode::kDistributed);
  replay("per-node budgets", BudgetMode::kLocal);
  return 0;
}

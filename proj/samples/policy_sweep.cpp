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

// Runs the three cache policies over a synthetic clustered dataset at a few
// budget levels and prints cumulative scan and network volume. Files are
// filled cluster by cluster, and the queries walk out from one cluster and
// back again.
//
//   policy_sweep [points] [files] [nodes]

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "arraycache/cluster.hpp"
#include "arraycache/io.hpp"

int main(int argc, char** argv) {
  using namespace arraycache;
  const std::uint64_t points = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 50'000;
  const std::uint32_t n_files = argc > 2 ? static_cast<std::uint32_t>(std::strtoul(argv[2], nullptr, 10)) : 40;
  const std::uint32_t nodes = argc > 3 ? static_cast<std::uint32_t>(std::strtoul(argv[3], nullptr, 10)) : 4;

  try {
    const ArraySchema schema({{"ra", 1, 2000}, {"dec", 1, 2000}}, {{"mag", AttrKind::kFloat}});
    SyntheticParams p;
    p.n_points = points;
    p.n_files = n_files;
    p.skew = Skew::kGaussianCluster;
    p.sigma = 100;
    p.clusters = 10;
    p.arrival = Arrival::kClustered;
    p.seed = 3;
    const auto files = distribute_files(generate_synthetic_dataset(schema, p), schema, nodes);

    const Coord side = 100;
    const auto center = files.front().cells.coords(0);
    const Coord lo0 = std::clamp<Coord>(center[0] - 2 * side, 1, 2000 - 5 * side);
    const Coord lo1 = std::clamp<Coord>(center[1] - side / 2, 1, 2000 - side);
    WorkloadParams wp{BoundingBox({lo0, lo1}, {lo0 + side - 1, lo1 + side - 1}), {side, 0}, 10, 1};
    const auto workload = generate_workload(WorkloadPattern::kShiftingReturn, wp, schema, p.seed);

    std::uint64_t total_bytes = 0;
    for (const auto& f : files) total_bytes += f.meta.cell_count * schema.cell_record_bytes();

    std::printf("%-10s %12s %16s %16s %14s\n", "policy", "budget/node", "bytes_scanned", "network_bytes",
                "result_cells");
    for (double share : {0.005, 0.02, 0.1}) {
      const auto budget = static_cast<std::uint64_t>(share * static_cast<double>(total_bytes) / nodes);
      for (Policy policy : {Policy::kCost, Policy::kChunkLru, Policy::kFileLru}) {
        ClusterConfig config;
        config.nodes = nodes;
        config.budget_per_node = budget;
        config.policy = policy;
        Cluster cluster(schema, files, config);
        for (const auto& q : workload.queries) cluster.run_query(q);
        const auto t = cluster.metrics().totals();
        std::printf("%-10s %12llu %16llu %16llu %14llu\n", policy_name(policy).c_str(),
                    static_cast<unsigned long long>(budget), static_cast<unsigned long long>(t.bytes_scanned),
                    static_cast<unsigned long long>(t.network_bytes),
                    static_cast<unsigned long long>(t.result_cell_count));
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "policy_sweep: %s\n", e.what());
    return 1;
  }
  return 0;
}

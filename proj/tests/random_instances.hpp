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

// Seeded random inputs shared by the property tests and the acceptance run.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "arraycache/cache_policy.hpp"
#include "arraycache/placement.hpp"
#include "fixtures.hpp"

namespace arraycache::testing {

// Distinct points in [1, extent]^rank; n is capped at the number of cells.
inline Points random_points(std::mt19937_64& rng, std::size_t n, Coord extent, std::size_t rank) {
  std::uniform_int_distribution<Coord> d(1, extent);
  std::uint64_t room = 1;
  for (std::size_t k = 0; k < rank; ++k) room *= static_cast<std::uint64_t>(extent);
  n = std::min<std::uint64_t>(n, room);
  std::set<std::vector<Coord>> seen;
  while (seen.size() < n) {
    std::vector<Coord> p(rank);
    for (auto& x : p) x = d(rng);
    seen.insert(p);
  }
  return {seen.begin(), seen.end()};
}

inline QuerySpec random_query(std::mt19937_64& rng, std::uint64_t id, Coord extent, std::size_t rank) {
  std::uniform_int_distribution<Coord> d(1, extent);
  std::vector<Coord> lo(rank), hi(rank);
  for (std::size_t k = 0; k < rank; ++k) {
    Coord a = d(rng), b = d(rng);
    lo[k] = std::min(a, b);
    hi[k] = std::max(a, b);
  }
  return {id, BoundingBox(lo, hi), 1};
}

// --- eviction ---------------------------------------------------------------

inline FileId eviction_file(std::uint32_t i) { return FileId{NodeId{0}, i}; }

inline RawFileMeta eviction_meta(std::uint32_t i, std::uint64_t bytes) {
  return RawFileMeta{eviction_file(i), 1, bytes, BoundingBox({0}, {0})};
}

struct EvictionInstance {
  FileMetaMap files;
  std::vector<CacheTriple> history;
  std::vector<CacheTriple> current;
  std::uint64_t budget = 0;
  std::uint64_t now = 0;
};

// Up to four files; chunk ids are drawn from a small per-file pool so triples
// of different queries share chunks.
inline EvictionInstance random_eviction_instance(std::mt19937_64& rng, std::size_t max_triples) {
  EvictionInstance in;
  const std::uint32_t n_files = 1 + rng() % 4;
  for (std::uint32_t f = 0; f < n_files; ++f) in.files.emplace(eviction_file(f), eviction_meta(f, 50 + rng() % 500));
  in.now = 10 + rng() % 5;
  const std::size_t n = 1 + rng() % max_triples;
  std::map<std::uint64_t, std::uint64_t> sizes;
  auto chunk = [&](std::uint32_t f) {
    const std::uint64_t id = f * 100 + rng() % 5;
    sizes.emplace(id, 1 + rng() % 40);
    return std::pair{id, sizes.at(id)};
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t f = rng() % n_files;
    CacheTriple t{in.now - 1 - rng() % 6, eviction_file(f), {}};
    const int k = 1 + rng() % 3;
    for (int j = 0; j < k; ++j) {
      auto [id, bytes] = chunk(f);
      if (std::none_of(t.chunks.begin(), t.chunks.end(), [&](const ChunkRef& r) { return r.id == ChunkId{id}; })) {
        t.chunks.push_back({ChunkId{id}, bytes});
      }
    }
    std::sort(t.chunks.begin(), t.chunks.end(), [](auto& a, auto& b) { return a.id < b.id; });
    in.history.push_back(std::move(t));
  }
  if (rng() % 2) {
    const std::uint32_t f = rng() % n_files;
    auto [id, bytes] = chunk(f);
    in.current.push_back({in.now, eviction_file(f), {{ChunkId{id}, bytes}}});
  }
  in.budget = rng() % 150;
  return in;
}

// --- placement --------------------------------------------------------------

struct PlacementInstance {
  PlacementState state;
  JoinHistory history;
  std::uint64_t now = 0;
};

// Chunks with random replica sets and eight queries of random join pairs.
// Roomy instances give every node the total chunk volume.
inline PlacementInstance random_placement_instance(std::mt19937_64& rng, std::size_t max_chunks,
                                                   std::uint32_t max_nodes, bool roomy) {
  PlacementInstance in;
  const std::uint32_t nodes = 1 + rng() % max_nodes;
  const std::size_t chunks = 1 + rng() % max_chunks;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < chunks; ++i) {
    std::vector<NodeId> reps;
    for (std::uint32_t n = 0; n < nodes; ++n) {
      if (rng() % 2) reps.push_back(NodeId{n});
    }
    if (reps.empty()) reps.push_back(NodeId{static_cast<std::uint32_t>(rng() % nodes)});
    in.state.locations[ChunkId{i}] = reps;
    in.state.sizes[ChunkId{i}] = 1 + rng() % 10;
    total += in.state.sizes[ChunkId{i}];
  }
  for (std::uint32_t n = 0; n < nodes; ++n) {
    in.state.budgets[NodeId{n}] = roomy ? total : total / nodes + rng() % (total + 1);
  }
  in.now = 8;
  for (std::uint64_t q = 1; q <= in.now; ++q) {
    std::vector<ChunkPair> pairs;
    const int k = rng() % 5;
    for (int i = 0; i < k; ++i) pairs.emplace_back(ChunkId{rng() % chunks}, ChunkId{rng() % chunks});
    in.history.add(q, pairs);
  }
  return in;
}

}  // namespace arraycache::testing

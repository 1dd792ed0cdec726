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

// Similarity join pieces used by the cluster simulator: chunk pair
// generation, greedy pair-to-node assignment, and cell-level L1 joins.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "arraycache/array.hpp"
#include "arraycache/chunk_index.hpp"
#include "arraycache/ids.hpp"
#include "arraycache/placement.hpp"

namespace arraycache {

// Flat list of points of one rank.
class PointBlock {
 public:
  PointBlock() = default;
  explicit PointBlock(std::size_t rank) : rank_(rank) {}

  static PointBlock from_rows(const CellSet& cells, std::span<const std::uint32_t> rows) {
    PointBlock b(cells.rank());
    b.coords_.reserve(rows.size() * cells.rank());
    for (auto r : rows) {
      const auto c = cells.coords(r);
      b.coords_.insert(b.coords_.end(), c.begin(), c.end());
    }
    return b;
  }

  // Only the rows lying inside `range`.
  static PointBlock from_rows_in(const CellSet& cells, std::span<const std::uint32_t> rows,
                                 const BoundingBox& range) {
    PointBlock b(cells.rank());
    for (auto r : rows) {
      const auto c = cells.coords(r);
      if (range.contains(c)) b.coords_.insert(b.coords_.end(), c.begin(), c.end());
    }
    return b;
  }

  void add(std::span<const Coord> p) { coords_.insert(coords_.end(), p.begin(), p.end()); }

  std::size_t rank() const { return rank_; }
  std::size_t size() const { return rank_ == 0 ? 0 : coords_.size() / rank_; }
  bool empty() const { return coords_.empty(); }
  std::span<const Coord> point(std::size_t i) const { return {coords_.data() + i * rank_, rank_}; }

 private:
  std::size_t rank_ = 0;
  std::vector<Coord> coords_;
};

namespace detail {

inline std::uint64_t hash_point(std::span<const Coord> p) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (Coord c : p) {
    h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
  }
  return h ^ (h >> 33);
}

// Open-addressing multiset of the points of a block.
class PointIndex {
 public:
  explicit PointIndex(const PointBlock& block) : block_(block) {
    std::size_t cap = 16;
    while (cap < block.size() * 2) cap <<= 1;
    slots_.assign(cap, kEmpty);
    mask_ = cap - 1;
    for (std::size_t i = 0; i < block.size(); ++i) {
      auto s = hash_point(block.point(i)) & mask_;
      while (slots_[s] != kEmpty) s = (s + 1) & mask_;
      slots_[s] = i;
    }
  }

  std::uint64_t count(std::span<const Coord> p) const {
    std::uint64_t n = 0;
    auto s = hash_point(p) & mask_;
    while (slots_[s] != kEmpty) {
      const auto q = block_.point(slots_[s]);
      if (std::equal(q.begin(), q.end(), p.begin())) ++n;
      s = (s + 1) & mask_;
    }
    return n;
  }

 private:
  static constexpr std::size_t kEmpty = static_cast<std::size_t>(-1);
  const PointBlock& block_;
  std::vector<std::size_t> slots_;
  std::size_t mask_ = 0;
};

inline void l1_ball(std::size_t rank, std::int64_t radius, std::vector<Coord>& prefix,
                    std::vector<std::vector<Coord>>& out) {
  if (prefix.size() == rank) {
    out.push_back(prefix);
    return;
  }
  for (std::int64_t o = -radius; o <= radius; ++o) {
    prefix.push_back(o);
    l1_ball(rank, radius - (o < 0 ? -o : o), prefix, out);
    prefix.pop_back();
  }
}

// Number of integer offsets with L1 norm <= r in `rank` dimensions, capped.
inline std::uint64_t l1_ball_size(std::size_t rank, std::uint64_t r, std::uint64_t cap) {
  // ways[j] = number of offsets over the dims seen so far with norm exactly j
  std::vector<std::uint64_t> ways(r + 1, 0);
  ways[0] = 1;
  for (std::size_t k = 0; k < rank; ++k) {
    std::vector<std::uint64_t> next(r + 1, 0);
    for (std::uint64_t j = 0; j <= r; ++j) {
      if (ways[j] == 0) continue;
      for (std::uint64_t o = 0; j + o <= r; ++o) {
        next[j + o] = std::min(cap, next[j + o] + ways[j] * (o == 0 ? 1 : 2));
      }
    }
    ways = std::move(next);
  }
  std::uint64_t total = 0;
  for (auto w : ways) total = std::min(cap, total + w);
  return total;
}

}  // namespace detail

// Ordered pairs (x, y), x from a and y from b, with L1 distance <= radius.
// A self-join passes the same block twice.
inline std::uint64_t similarity_join_cells(const PointBlock& a, const PointBlock& b,
                                           std::uint64_t radius) {
  if (a.empty() || b.empty()) return 0;
  if (a.rank() != b.rank()) throw UsageError("similarity join of blocks with different rank");
  const std::uint64_t brute = static_cast<std::uint64_t>(a.size()) * b.size();
  const std::uint64_t ball = detail::l1_ball_size(a.rank(), radius, brute + 1);
  if (brute <= 64 || ball * a.size() + b.size() >= brute) {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (l1_distance(a.point(i), b.point(j)) <= radius) ++n;
      }
    }
    return n;
  }
  std::vector<std::vector<Coord>> offsets;
  std::vector<Coord> prefix;
  detail::l1_ball(a.rank(), static_cast<std::int64_t>(radius), prefix, offsets);
  const detail::PointIndex index(b);
  std::vector<Coord> probe(a.rank());
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto p = a.point(i);
    for (const auto& o : offsets) {
      for (std::size_t k = 0; k < probe.size(); ++k) probe[k] = p[k] + o[k];
      n += index.count(probe);
    }
  }
  return n;
}

// Chunk pairs that may hold cells within `shape_radius` of each other:
// (a, b) with a <= b such that a's box grown by the radius meets b's box and
// both boxes meet the query range. Self pairs included.
inline std::vector<ChunkPair> generate_pairs(std::span<const ChunkSummary> chunks,
                                             const QuerySpec& q, const ArraySchema& schema) {
  std::vector<const ChunkSummary*> live;
  for (const auto& c : chunks) {
    if (intersects(c.box, q.range)) live.push_back(&c);
  }
  std::sort(live.begin(), live.end(), [](auto* a, auto* b) { return a->id < b->id; });
  std::vector<BoundingBox> grown;
  grown.reserve(live.size());
  for (auto* c : live) grown.push_back(expand(c->box, q.shape_radius, schema));

  std::vector<ChunkPair> out;
  for (std::size_t i = 0; i < live.size(); ++i) {
    for (std::size_t j = i; j < live.size(); ++j) {
      if (j == i || intersects(grown[i], live[j]->box)) out.emplace_back(live[i]->id, live[j]->id);
    }
  }
  return out;
}

struct JoinTask {
  ChunkPair pair;
  NodeId node{};
  std::uint64_t transfer_bytes = 0;
};

// chunk -> node -> bytes of the chunk present on that node
using Holdings = std::map<ChunkId, std::map<NodeId, std::uint64_t>>;

// Greedy stand-in for a join optimizer: each pair in turn runs on the node
// needing the fewest transferred bytes, then the node with fewer tasks so
// far, then the lowest node id. Transfers leave full replicas behind in
// `holdings`.
inline std::vector<JoinTask> assign_pairs(std::span<const ChunkPair> pairs, Holdings& holdings,
                                          const std::map<ChunkId, std::uint64_t>& sizes,
                                          std::span<const NodeId> nodes) {
  if (nodes.empty()) throw UsageError("assign_pairs needs at least one node");
  std::map<NodeId, std::uint64_t> load;
  std::vector<JoinTask> tasks;
  tasks.reserve(pairs.size());
  auto missing = [&](ChunkId c, NodeId n) -> std::uint64_t {
    const auto size = sizes.at(c);
    auto it = holdings.find(c);
    if (it == holdings.end()) return size;
    auto h = it->second.find(n);
    return h == it->second.end() ? size : size - std::min(size, h->second);
  };
  for (const auto& pair : pairs) {
    NodeId best = nodes.front();
    std::uint64_t best_cost = 0;
    bool first = true;
    for (NodeId n : nodes) {
      std::uint64_t cost = missing(pair.first, n);
      if (pair.second != pair.first) cost += missing(pair.second, n);
      if (first || cost < best_cost || (cost == best_cost && load[n] < load[best])) {
        best = n;
        best_cost = cost;
        first = false;
      }
    }
    holdings[pair.first][best] = sizes.at(pair.first);
    holdings[pair.second][best] = sizes.at(pair.second);
    ++load[best];
    tasks.push_back({pair, best, best_cost});
  }
  return tasks;
}

}  // namespace arraycache

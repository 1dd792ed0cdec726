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

// Cache placement: choose one home node per cached chunk, preferring nodes
// that already hold the chunk's join partners.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "arraycache/cache_policy.hpp"
#include "arraycache/ids.hpp"

namespace arraycache {

using ChunkPair = std::pair<ChunkId, ChunkId>;

inline ChunkPair ordered_pair(ChunkId a, ChunkId b) {
  return a < b ? ChunkPair{a, b} : ChunkPair{b, a};
}

// Chunk pairs joined by recent queries. Self pairs are never recorded.
class JoinHistory {
 public:
  struct Entry {
    std::uint64_t query_id = 0;
    std::vector<ChunkPair> pairs;  // ordered (first < second), sorted, unique
  };

  void add(std::uint64_t query_id, std::span<const ChunkPair> pairs) {
    Entry e{query_id, {}};
    for (const auto& [a, b] : pairs) {
      if (a != b) e.pairs.push_back(ordered_pair(a, b));
    }
    std::sort(e.pairs.begin(), e.pairs.end());
    e.pairs.erase(std::unique(e.pairs.begin(), e.pairs.end()), e.pairs.end());
    entries_.push_back(std::move(e));
  }

  // Drops entries whose weight has decayed to zero.
  void purge(std::uint64_t current_query_id, std::uint32_t window) {
    std::erase_if(entries_, [&](const Entry& e) {
      return detail::age_of(e.query_id, current_query_id) >= window;
    });
  }

  // Replaces `parent` by each of `children` after a chunk split.
  void remap(ChunkId parent, std::span<const ChunkId> children) {
    for (auto& e : entries_) {
      std::vector<ChunkPair> out;
      bool touched = false;
      for (const auto& [a, b] : e.pairs) {
        if (a != parent && b != parent) {
          out.push_back({a, b});
          continue;
        }
        touched = true;
        const ChunkId other = a == parent ? b : a;
        for (ChunkId c : children) {
          if (c != other) out.push_back(ordered_pair(c, other));
        }
      }
      if (touched) {
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        e.pairs = std::move(out);
      }
    }
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry>& mutable_entries() { return entries_; }

  // chunk -> (partner, summed query weight) over the whole history.
  std::unordered_map<ChunkId, std::map<ChunkId, double>> partner_weights(
      std::uint64_t current_query_id, const QueryWeight& weights) const {
    std::unordered_map<ChunkId, std::map<ChunkId, double>> out;
    for (const auto& e : entries_) {
      const double w = weights(detail::age_of(e.query_id, current_query_id));
      if (w == 0.0) continue;
      for (const auto& [a, b] : e.pairs) {
        out[a][b] += w;
        out[b][a] += w;
      }
    }
    return out;
  }

 private:
  std::vector<Entry> entries_;
};

struct NodeCharge {
  NodeId node{};
  std::uint64_t bytes = 0;

  friend bool operator==(const NodeCharge&, const NodeCharge&) = default;
};

struct PlacementState {
  std::map<ChunkId, std::vector<NodeId>> locations;  // replica nodes after query execution
  std::map<ChunkId, std::uint64_t> sizes;
  std::map<NodeId, std::uint64_t> budgets;  // bytes available per node
};

struct PlacementPlan {
  std::map<ChunkId, NodeId> home;
  // Bytes of each chunk charged per node; the home node comes first. A chunk
  // larger than any single node's free budget is striped over several nodes.
  std::map<ChunkId, std::vector<NodeCharge>> charges;
  std::vector<ChunkId> dropped;
  std::vector<std::pair<ChunkId, NodeId>> replica_drops;
  std::map<NodeId, std::uint64_t> used;
};

// Weighted number of c's join partners already homed on n.
inline double placement_cost(ChunkId c, NodeId n, const PlacementPlan& placed,
                             const JoinHistory& history, std::uint64_t current_query_id,
                             const QueryWeight& weights) {
  double cost = 0.0;
  for (const auto& e : history.entries()) {
    const double w = weights(detail::age_of(e.query_id, current_query_id));
    if (w == 0.0) continue;
    std::uint64_t count = 0;
    for (const auto& [a, b] : e.pairs) {
      if (a != c && b != c) continue;
      auto it = placed.home.find(a == c ? b : a);
      if (it != placed.home.end() && it->second == n) ++count;
    }
    cost += w * static_cast<double>(count);
  }
  return cost;
}

// Sum of query weights over collocated join pairs.
inline double collocation_objective(const std::map<ChunkId, NodeId>& home,
                                    const JoinHistory& history, std::uint64_t current_query_id,
                                    const QueryWeight& weights) {
  double total = 0.0;
  for (const auto& e : history.entries()) {
    const double w = weights(detail::age_of(e.query_id, current_query_id));
    for (const auto& [a, b] : e.pairs) {
      auto ia = home.find(a);
      auto ib = home.find(b);
      if (ia != home.end() && ib != home.end() && ia->second == ib->second) total += w;
    }
  }
  return total;
}

namespace detail {

// Charges `size` bytes starting at `home`, spilling the remainder onto the
// nodes with the most free budget. nullopt when the cluster lacks room. The
// first charge names the chunk's home.
inline std::optional<std::vector<NodeCharge>> stripe(NodeId home, std::uint64_t size,
                                                     std::map<NodeId, std::uint64_t>& remaining) {
  std::uint64_t total = 0;
  for (const auto& [n, r] : remaining) total += r;
  if (total < size) return std::nullopt;
  std::vector<NodeCharge> out;
  const std::uint64_t at_home = std::min(size, remaining[home]);
  out.push_back({home, at_home});  // kept at zero bytes so the home stays put
  std::uint64_t left = size - at_home;
  std::vector<std::pair<NodeId, std::uint64_t>> others;
  for (const auto& [n, r] : remaining) {
    if (n != home && r > 0) others.emplace_back(n, r);
  }
  std::stable_sort(others.begin(), others.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [n, r] : others) {
    if (left == 0) break;
    const auto take = std::min(left, r);
    out.push_back({n, take});
    left -= take;
  }
  for (const auto& c : out) remaining[c.node] -= c.bytes;
  return out;
}

inline void commit(PlacementPlan& plan, ChunkId c, std::vector<NodeCharge> charges) {
  plan.home[c] = charges.front().node;
  for (const auto& ch : charges) plan.used[ch.node] += ch.bytes;
  plan.charges[c] = std::move(charges);
}

}  // namespace detail

// Greedy placement. Single-replica chunks keep their node. The rest go in
// increasing replica count to the replica node with room that maximizes
// placement_cost. Ties prefer the node holding replicas of more (weighted)
// not-yet-placed partners, then the most free budget, then the lowest id.
// Homes are always existing replica nodes. A chunk that fits on none of its
// replica nodes takes what its emptiest replica node has left; the rest is
// spilled onto other nodes once every other chunk has been placed.
inline PlacementPlan plan_placement(const PlacementState& state, const JoinHistory& history,
                                    std::uint64_t current_query_id, const QueryWeight& weights) {
  PlacementPlan plan;
  std::map<NodeId, std::uint64_t> remaining = state.budgets;
  const auto partners = history.partner_weights(current_query_id, weights);

  std::vector<ChunkId> order;
  for (const auto& [c, nodes] : state.locations) {
    if (nodes.empty()) throw UsageError("chunk " + to_string(c) + " has no replica");
    order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](ChunkId a, ChunkId b) {
    return state.locations.at(a).size() < state.locations.at(b).size();
  });

  auto drop_replicas = [&](ChunkId c, std::optional<NodeId> keep) {
    for (NodeId n : state.locations.at(c)) {
      if (!keep || n != *keep) plan.replica_drops.emplace_back(c, n);
    }
  };

  struct Partial {
    ChunkId chunk;
    NodeId home;
    std::uint64_t at_home;
  };
  std::vector<Partial> partial;

  for (ChunkId c : order) {
    const auto& nodes = state.locations.at(c);
    const std::uint64_t size = state.sizes.at(c);

    std::optional<NodeId> best;
    if (nodes.size() == 1) {
      if (remaining[nodes.front()] >= size) best = nodes.front();
    } else {
      double best_cost = -1.0, best_look = -1.0;
      auto it = partners.find(c);
      for (NodeId n : nodes) {
        if (remaining[n] < size) continue;
        double cost = 0.0, look = 0.0;
        if (it != partners.end()) {
          for (const auto& [p, w] : it->second) {
            auto h = plan.home.find(p);
            if (h != plan.home.end()) {
              if (h->second == n) cost += w;
            } else if (auto loc = state.locations.find(p); loc != state.locations.end() &&
                       std::find(loc->second.begin(), loc->second.end(), n) != loc->second.end()) {
              look += w;
            }
          }
        }
        const bool better =
            !best || cost > best_cost ||
            (cost == best_cost &&
             (look > best_look ||
              (look == best_look &&
               (remaining[n] > remaining[*best] || (remaining[n] == remaining[*best] && n < *best)))));
        if (better) {
          best = n;
          best_cost = cost;
          best_look = look;
        }
      }
    }

    if (best) {
      remaining[*best] -= size;
      detail::commit(plan, c, {{*best, size}});
      drop_replicas(c, best);
      continue;
    }
    NodeId home = nodes.front();
    for (NodeId n : nodes) {
      if (remaining[n] > remaining[home]) home = n;
    }
    const std::uint64_t at_home = remaining[home];
    remaining[home] = 0;
    partial.push_back({c, home, at_home});
  }

  for (const auto& p : partial) {
    const std::uint64_t size = state.sizes.at(p.chunk);
    remaining[p.home] += p.at_home;
    if (auto charges = detail::stripe(p.home, size, remaining)) {
      detail::commit(plan, p.chunk, std::move(*charges));
      drop_replicas(p.chunk, p.home);
    } else {
      plan.dropped.push_back(p.chunk);
      drop_replicas(p.chunk, std::nullopt);
    }
  }
  return plan;
}

// Origin-style placement used by the LRU baselines and when co-location is
// disabled: each chunk goes to its preferred node if it fits, otherwise to
// the node with the most free budget, striping when no node fits it whole.
// Chunks are processed in the given order.
inline PlacementPlan plan_static_placement(std::span<const std::pair<ChunkId, NodeId>> preferred,
                                           const std::map<ChunkId, std::uint64_t>& sizes,
                                           const std::map<NodeId, std::uint64_t>& budgets) {
  PlacementPlan plan;
  std::map<NodeId, std::uint64_t> remaining = budgets;
  for (const auto& [c, pref] : preferred) {
    const std::uint64_t size = sizes.at(c);
    NodeId target = pref;
    if (remaining[pref] < size) {
      for (const auto& [n, r] : remaining) {
        if (r > remaining[target]) target = n;
      }
    }
    if (remaining[target] >= size) {
      remaining[target] -= size;
      detail::commit(plan, c, {{target, size}});
    } else if (auto charges = detail::stripe(target, size, remaining)) {
      detail::commit(plan, c, std::move(*charges));
    } else {
      plan.dropped.push_back(c);
    }
  }
  return plan;
}

}  // namespace arraycache

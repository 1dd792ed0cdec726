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

// Global cache eviction: the cost-based greedy and the two LRU baselines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "arraycache/chunk_index.hpp"
#include "arraycache/errors.hpp"
#include "arraycache/ids.hpp"

namespace arraycache {

// Exponentially decayed query importance, relative to the current query:
// weight(age) = scale * decay_base^-age inside the window, 0 beyond it.
struct QueryWeight {
  double decay_base = 2.0;
  std::uint32_t window = 16;
  double scale = 1.0;

  void validate() const {
    if (!(decay_base > 1.0)) throw UsageError("decay_base must be > 1");
    if (window == 0) throw UsageError("window must be >= 1");
    if (!(scale > 0.0)) throw UsageError("weight scale must be positive");
  }

  double operator()(std::uint64_t age) const {
    if (age >= window) return 0.0;
    return scale * std::pow(decay_base, -static_cast<double>(age));
  }
};

struct ChunkRef {
  ChunkId id{};
  std::uint64_t bytes = 0;

  friend bool operator==(const ChunkRef&, const ChunkRef&) = default;
};

// Chunks of one file accessed by one query.
struct CacheTriple {
  std::uint64_t query_id = 0;
  FileId file;
  std::vector<ChunkRef> chunks;

  friend bool operator==(const CacheTriple&, const CacheTriple&) = default;
};

using FileMetaMap = std::map<FileId, RawFileMeta>;

namespace detail {

inline std::uint64_t age_of(std::uint64_t query_id, std::uint64_t current_query_id) {
  return current_query_id > query_id ? current_query_id - query_id : 0;
}

inline double cost_from(double weight, std::uint64_t file_bytes, std::uint64_t uncached_bytes) {
  if (weight == 0.0) return 0.0;
  if (uncached_bytes == 0) return std::numeric_limits<double>::infinity();
  return weight * static_cast<double>(file_bytes) / static_cast<double>(uncached_bytes);
}

inline const RawFileMeta& file_meta(const FileMetaMap& files, const FileId& f) {
  auto it = files.find(f);
  if (it == files.end()) throw UsageError("unknown file " + to_string(f));
  return it->second;
}

}  // namespace detail

// weight * file_bytes / (bytes of the triple's chunks not yet kept). A triple
// whose chunks are all kept costs +infinity, so its file is never evicted; a
// triple outside the weight window costs 0.
inline double eviction_cost(const CacheTriple& t, const std::set<ChunkId>& kept,
                            std::uint64_t current_query_id, const QueryWeight& weights,
                            const FileMetaMap& files) {
  const auto& meta = detail::file_meta(files, t.file);
  std::uint64_t uncached = 0;
  for (const auto& c : t.chunks) {
    if (!kept.contains(c.id)) uncached += c.bytes;
  }
  return detail::cost_from(weights(detail::age_of(t.query_id, current_query_id)), meta.file_bytes,
                           uncached);
}

struct EvictionPlan {
  std::vector<CacheTriple> keep;
  std::vector<CacheTriple> evict;
  std::set<ChunkId> kept_chunks;
  std::set<ChunkId> dropped_chunks;
  std::uint64_t kept_bytes = 0;
  // Indices into the history argument, in admission order.
  std::vector<std::size_t> admitted;
};

// Cost-based eviction. The current query's triples are admitted first (by
// descending chunk size when they alone exceed the budget). Historical
// triples are then admitted one at a time, always the fitting triple of
// maximum cost, where cost is re-evaluated against the chunks kept so far.
// Each distinct chunk is charged once.
inline EvictionPlan plan_eviction(std::span<const CacheTriple> history,
                                  std::span<const CacheTriple> current, std::uint64_t budget,
                                  std::uint64_t current_query_id, const QueryWeight& weights,
                                  const FileMetaMap& files) {
  EvictionPlan plan;
  std::unordered_map<ChunkId, std::uint64_t> sizes;
  for (const auto& t : history) {
    for (const auto& c : t.chunks) sizes.emplace(c.id, c.bytes);
  }
  for (const auto& t : current) {
    for (const auto& c : t.chunks) sizes.emplace(c.id, c.bytes);
  }

  std::set<ChunkId>& kept = plan.kept_chunks;
  auto keep_chunk = [&](ChunkId id) {
    if (kept.insert(id).second) plan.kept_bytes += sizes.at(id);
  };

  {
    std::map<ChunkId, std::uint64_t> wanted;
    std::uint64_t total = 0;
    for (const auto& t : current) {
      for (const auto& c : t.chunks) {
        if (wanted.emplace(c.id, c.bytes).second) total += c.bytes;
      }
    }
    if (total <= budget) {
      for (const auto& [id, bytes] : wanted) keep_chunk(id);
    } else {
      std::vector<std::pair<ChunkId, std::uint64_t>> order(wanted.begin(), wanted.end());
      std::stable_sort(order.begin(), order.end(),
                       [](const auto& a, const auto& b) { return a.second > b.second; });
      for (const auto& [id, bytes] : order) {
        if (plan.kept_bytes + bytes <= budget) keep_chunk(id);
      }
    }
    for (const auto& t : current) {
      const bool any = std::any_of(t.chunks.begin(), t.chunks.end(),
                                   [&](const ChunkRef& c) { return kept.contains(c.id); });
      (any ? plan.keep : plan.evict).push_back(t);
    }
  }

  const std::size_t n = history.size();
  std::vector<std::uint64_t> uncached(n, 0);
  std::vector<std::uint32_t> version(n, 0);
  std::vector<bool> admitted(n, false);
  std::vector<double> weight(n);
  std::vector<std::uint64_t> file_bytes(n);
  std::unordered_map<ChunkId, std::vector<std::size_t>> triples_of;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = history[i];
    weight[i] = weights(detail::age_of(t.query_id, current_query_id));
    file_bytes[i] = detail::file_meta(files, t.file).file_bytes;
    for (const auto& c : t.chunks) {
      triples_of[c.id].push_back(i);
      if (!kept.contains(c.id)) uncached[i] += c.bytes;
    }
  }

  struct Entry {
    double cost;
    std::size_t index;
    std::uint32_t version;
  };
  // Higher cost first; ties prefer the newer query, then lower file id, then
  // lower first chunk id.
  auto first_chunk = [&](std::size_t i) {
    return history[i].chunks.empty() ? std::uint64_t{0} : to_underlying(history[i].chunks.front().id);
  };
  auto less = [&](const Entry& a, const Entry& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    const auto& ta = history[a.index];
    const auto& tb = history[b.index];
    if (ta.query_id != tb.query_id) return ta.query_id < tb.query_id;
    if (ta.file != tb.file) return tb.file < ta.file;
    if (first_chunk(a.index) != first_chunk(b.index)) return first_chunk(b.index) < first_chunk(a.index);
    return b.index < a.index;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(less)> heap(less);
  for (std::size_t i = 0; i < n; ++i) {
    heap.push({detail::cost_from(weight[i], file_bytes[i], uncached[i]), i, 0});
  }

  while (!heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    const std::size_t i = top.index;
    if (admitted[i] || top.version != version[i]) continue;
    // A triple that does not fit can only fit later if some of its chunks get
    // kept, which bumps its version and re-queues it.
    if (plan.kept_bytes + uncached[i] > budget) continue;
    admitted[i] = true;
    plan.admitted.push_back(i);
    for (const auto& c : history[i].chunks) {
      if (kept.contains(c.id)) continue;
      keep_chunk(c.id);
      for (std::size_t j : triples_of[c.id]) {
        if (admitted[j]) continue;
        uncached[j] -= c.bytes;
        ++version[j];
        heap.push({detail::cost_from(weight[j], file_bytes[j], uncached[j]), j, version[j]});
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    (admitted[i] ? plan.keep : plan.evict).push_back(history[i]);
  }
  for (const auto& [id, bytes] : sizes) {
    if (!kept.contains(id)) plan.dropped_chunks.insert(id);
  }
  return plan;
}

template <typename Key>
struct LruEntry {
  Key key{};
  std::uint64_t bytes = 0;
  std::uint64_t last_access = 0;
};

template <typename Key>
struct LruPlan {
  std::vector<Key> keep;
  std::vector<Key> evict;
  std::uint64_t kept_bytes = 0;
};

// Classic LRU over arbitrary units. Entries accessed by the current query are
// the most recent and are admitted first (largest first when they alone do
// not fit); older residents are then kept newest-first until the first one
// that no longer fits, and everything older is evicted.
template <typename Key>
LruPlan<Key> plan_lru(std::span<const LruEntry<Key>> resident,
                      std::span<const LruEntry<Key>> accessed, std::uint64_t budget) {
  std::map<Key, LruEntry<Key>> now;
  for (const auto& e : accessed) now[e.key] = e;
  std::vector<LruEntry<Key>> current(accessed.begin(), accessed.end());
  std::vector<LruEntry<Key>> older;
  for (const auto& e : resident) {
    if (!now.contains(e.key)) older.push_back(e);
  }
  std::sort(current.begin(), current.end(), [](const auto& a, const auto& b) {
    if (a.bytes != b.bytes) return a.bytes > b.bytes;
    return a.key < b.key;
  });
  current.erase(std::unique(current.begin(), current.end(),
                            [](const auto& a, const auto& b) { return a.key == b.key; }),
                current.end());
  std::sort(older.begin(), older.end(), [](const auto& a, const auto& b) {
    if (a.last_access != b.last_access) return a.last_access > b.last_access;
    return a.key < b.key;
  });

  LruPlan<Key> plan;
  for (const auto& e : current) {
    if (plan.kept_bytes + e.bytes <= budget) {
      plan.kept_bytes += e.bytes;
      plan.keep.push_back(e.key);
    } else {
      plan.evict.push_back(e.key);
    }
  }
  bool full = false;
  for (const auto& e : older) {
    if (!full && plan.kept_bytes + e.bytes <= budget) {
      plan.kept_bytes += e.bytes;
      plan.keep.push_back(e.key);
    } else {
      full = true;
      plan.evict.push_back(e.key);
    }
  }
  return plan;
}

inline LruPlan<ChunkId> plan_eviction_chunk_lru(std::span<const LruEntry<ChunkId>> resident,
                                                std::span<const LruEntry<ChunkId>> accessed,
                                                std::uint64_t budget) {
  return plan_lru<ChunkId>(resident, accessed, budget);
}

inline LruPlan<FileId> plan_eviction_file_lru(std::span<const LruEntry<FileId>> resident,
                                              std::span<const LruEntry<FileId>> accessed,
                                              std::uint64_t budget) {
  return plan_lru<FileId>(resident, accessed, budget);
}

enum class Policy { kCost, kChunkLru, kFileLru };

inline Policy parse_policy(const std::string& name) {
  if (name == "cost") return Policy::kCost;
  if (name == "chunk-lru") return Policy::kChunkLru;
  if (name == "file-lru") return Policy::kFileLru;
  throw UsageError("unknown policy '" + name + "' (expected cost, chunk-lru or file-lru)");
}

inline std::string policy_name(Policy p) {
  switch (p) {
    case Policy::kCost: return "cost";
    case Policy::kChunkLru: return "chunk-lru";
    case Policy::kFileLru: return "file-lru";
  }
  return "?";
}

}  // namespace arraycache

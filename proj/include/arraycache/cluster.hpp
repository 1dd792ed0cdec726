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

// Deterministic in-process model of a coordinator plus N worker nodes, each
// with a local cache and its own raw files. One query at a time flows through
// chunk discovery, raw scans, chunk refinement, join pair generation and
// assignment, the cell-level join, eviction, and placement. Disk and network
// costs are charged in bytes.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iterator>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "arraycache/array.hpp"
#include "arraycache/cache_policy.hpp"
#include "arraycache/chunk_index.hpp"
#include "arraycache/errors.hpp"
#include "arraycache/ids.hpp"
#include "arraycache/join.hpp"
#include "arraycache/placement.hpp"

namespace arraycache {

enum class BudgetMode {
  kDistributed,  // one cluster-wide budget; chunks may live on any node
  kLocal,        // each node caches only its own files within its own budget
};

struct ClusterConfig {
  std::uint32_t nodes = 1;
  std::uint64_t budget_per_node = 0;
  std::vector<std::uint64_t> node_budgets;  // overrides budget_per_node when non-empty
  std::uint64_t min_cells = kDefaultMinCells;
  QueryWeight weights;
  Policy policy = Policy::kCost;
  bool placement = true;  // co-location placement; cost policy only
  BudgetMode budgeting = BudgetMode::kDistributed;
  bool record_trace = false;

  std::uint64_t budget_of(NodeId n) const {
    return node_budgets.empty() ? budget_per_node : node_budgets.at(to_underlying(n));
  }

  void validate() const {
    if (nodes == 0) throw UsageError("cluster needs at least one node");
    if (!node_budgets.empty() && node_budgets.size() != nodes) {
      throw UsageError("node_budgets must list one budget per node");
    }
    if (min_cells == 0) throw UsageError("min_cells must be >= 1");
    weights.validate();
  }
};

// A raw file as stored on its node's local disk.
struct RawFile {
  RawFileMeta meta;
  CellSet cells;
};

struct QueryMetrics {
  std::uint64_t query_id = 0;
  std::uint64_t files_scanned = 0;
  std::uint64_t bytes_scanned = 0;
  std::uint64_t network_bytes = 0;
  std::uint64_t cache_hit_chunks = 0;
  std::uint64_t cache_miss_chunks = 0;
  std::uint64_t cross_pairs = 0;
  std::uint64_t collocated_pairs = 0;
  double collocated_pair_fraction = 1.0;
  std::uint64_t result_cell_count = 0;
  std::uint64_t join_tasks = 0;
  std::uint64_t splits = 0;
  std::uint64_t total_chunks = 0;
  std::uint64_t resident_chunks = 0;
  std::uint64_t resident_bytes = 0;

  friend bool operator==(const QueryMetrics&, const QueryMetrics&) = default;
};

struct MetricsLog {
  std::vector<QueryMetrics> queries;

  QueryMetrics totals() const {
    QueryMetrics t;
    for (const auto& q : queries) {
      t.files_scanned += q.files_scanned;
      t.bytes_scanned += q.bytes_scanned;
      t.network_bytes += q.network_bytes;
      t.cache_hit_chunks += q.cache_hit_chunks;
      t.cache_miss_chunks += q.cache_miss_chunks;
      t.cross_pairs += q.cross_pairs;
      t.collocated_pairs += q.collocated_pairs;
      t.result_cell_count += q.result_cell_count;
      t.join_tasks += q.join_tasks;
      t.splits += q.splits;
    }
    t.collocated_pair_fraction =
        t.cross_pairs == 0 ? 1.0
                           : static_cast<double>(t.collocated_pairs) / static_cast<double>(t.cross_pairs);
    if (!queries.empty()) {
      t.query_id = queries.back().query_id;
      t.total_chunks = queries.back().total_chunks;
      t.resident_chunks = queries.back().resident_chunks;
      t.resident_bytes = queries.back().resident_bytes;
    }
    return t;
  }
};

// Wall-clock, informational only; never part of deterministic output.
struct QueryTiming {
  double refine_seconds = 0;
  double evict_seconds = 0;
  double place_seconds = 0;
  double pipeline_seconds = 0;

  double planning_seconds() const { return refine_seconds + evict_seconds + place_seconds; }
};

struct QueryTrace {
  std::uint64_t query_id = 0;
  std::vector<SplitRecord> splits;
  std::vector<JoinTask> tasks;
  std::vector<ChunkId> kept;
  std::vector<ChunkId> dropped;
  std::map<ChunkId, std::vector<NodeCharge>> residency;
};

// Everything needed to resume a cluster, minus the raw files themselves.
struct ClusterStateData {
  std::uint64_t next_chunk_id = 0;
  std::uint64_t last_query_id = 0;
  std::vector<std::vector<ChunkSummary>> chunks;  // per file, in file order
  std::vector<std::vector<SplitRecord>> split_history;
  std::map<ChunkId, std::vector<NodeCharge>> residency;
  std::vector<CacheTriple> history;
  std::vector<JoinHistory::Entry> joins;
  std::map<ChunkId, std::uint64_t> chunk_access;
  std::map<FileId, std::uint64_t> file_access;
  MetricsLog metrics;
};

class Cluster {
 public:
  Cluster(ArraySchema schema, std::vector<RawFile> files, ClusterConfig config)
      : schema_(std::move(schema)), files_(std::move(files)), config_(std::move(config)) {
    config_.validate();
    std::sort(files_.begin(), files_.end(),
              [](const RawFile& a, const RawFile& b) { return a.meta.file_id < b.meta.file_id; });
    for (std::size_t i = 0; i < files_.size(); ++i) {
      const auto& f = files_[i];
      if (to_underlying(f.meta.file_id.node) >= config_.nodes) {
        throw UsageError("file " + to_string(f.meta.file_id) + " lives on a node outside the cluster");
      }
      if (f.cells.size() != f.meta.cell_count || f.cells.empty()) {
        throw UsageError("file " + to_string(f.meta.file_id) + " metadata disagrees with its cells");
      }
      if (!file_index_.emplace(f.meta.file_id, i).second) {
        throw UsageError("duplicate file id " + to_string(f.meta.file_id));
      }
      file_meta_.emplace(f.meta.file_id, f.meta);
      const ChunkId root = ids_.next();
      chunking_.emplace_back(f.meta, schema_.cell_record_bytes(), config_.min_cells, root);
      std::vector<std::uint32_t> rows(f.cells.size());
      std::iota(rows.begin(), rows.end(), 0u);
      rows_.emplace(root, std::move(rows));
      chunk_file_.emplace(root, i);
    }
    for (std::uint32_t n = 0; n < config_.nodes; ++n) nodes_.push_back(NodeId{n});
  }

  const ArraySchema& schema() const { return schema_; }
  const ClusterConfig& config() const { return config_; }
  const std::vector<RawFile>& files() const { return files_; }
  const FileMetaMap& file_meta() const { return file_meta_; }
  const MetricsLog& metrics() const { return metrics_; }
  const std::vector<QueryTiming>& timings() const { return timings_; }
  const std::vector<QueryTrace>& traces() const { return traces_; }
  const std::map<ChunkId, std::vector<NodeCharge>>& residency() const { return residency_; }
  const std::vector<CacheTriple>& cache_history() const { return history_; }
  const JoinHistory& join_history() const { return joins_; }

  const FileChunking& chunking(const FileId& f) const { return chunking_.at(index_of(f)); }

  // Rows (into the owning file's cells) of a live chunk.
  const std::vector<std::uint32_t>& chunk_rows(ChunkId c) const { return rows_.at(c); }

  const ChunkSummary& chunk(ChunkId c) const {
    return chunking_.at(chunk_file_.at(c)).chunk(c);
  }

  std::uint64_t total_budget() const {
    std::uint64_t b = 0;
    for (NodeId n : nodes_) b += config_.budget_of(n);
    return b;
  }

  std::map<NodeId, std::uint64_t> node_usage() const {
    std::map<NodeId, std::uint64_t> used;
    for (NodeId n : nodes_) used[n] = 0;
    for (const auto& [c, charges] : residency_) {
      for (const auto& ch : charges) used[ch.node] += ch.bytes;
    }
    return used;
  }

  std::size_t total_chunks() const {
    std::size_t n = 0;
    for (const auto& fc : chunking_) n += fc.chunks().size();
    return n;
  }

  QueryMetrics run_query(const QuerySpec& q) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    validate_query(q);
    QueryTiming timing;
    QueryTrace trace;
    trace.query_id = q.id;
    QueryMetrics m;
    m.query_id = q.id;

    // (1)-(2) file discovery, chunk lookup, raw scans
    struct FileWork {
      std::size_t index;
      std::vector<ChunkId> overlapping;
      bool scanned = false;
    };
    std::vector<FileWork> work;
    Holdings holdings;
    for (std::size_t i = 0; i < files_.size(); ++i) {
      const auto& f = files_[i];
      if (!intersects(f.meta.box, q.range)) continue;
      FileWork w{i, chunking_[i].overlapping(q.range)};
      if (w.overlapping.empty()) continue;
      for (ChunkId c : w.overlapping) {
        if (auto it = residency_.find(c); it != residency_.end()) {
          ++m.cache_hit_chunks;
          for (const auto& ch : it->second) holdings[c][ch.node] += ch.bytes;
        } else {
          ++m.cache_miss_chunks;
          w.scanned = true;
        }
      }
      if (w.scanned) {
        ++m.files_scanned;
        m.bytes_scanned += f.meta.file_bytes;
        for (ChunkId c : w.overlapping) holdings[c][f.meta.file_id.node] = chunk(c).size_bytes;
      }
      work.push_back(std::move(w));
    }

    // (3) refinement
    std::vector<ChunkId> flagged;
    auto t_refine = Clock::now();
    for (auto& w : work) {
      if (config_.policy == Policy::kFileLru) {
        flagged.insert(flagged.end(), w.overlapping.begin(), w.overlapping.end());
        continue;
      }
      std::map<ChunkId, std::vector<std::uint32_t>> rows_by_chunk;
      for (ChunkId c : w.overlapping) rows_by_chunk.emplace(c, rows_.at(c));
      auto result = chunking_[w.index].refine(q, files_[w.index].cells, rows_by_chunk, ids_);
      std::set<ChunkId> discarded;
      for (auto& rc : result.chunks) {
        const ChunkId id = rc.summary.id;
        if (!rows_.contains(id)) {
          rows_.emplace(id, std::move(rc.rows));
          chunk_file_.emplace(id, w.index);
        }
        if (rc.overlaps_query) {
          flagged.push_back(id);
        } else {
          discarded.insert(id);
        }
      }
      for (const auto& s : result.splits) apply_split(s, holdings, discarded);
      m.splits += result.splits.size();
      if (config_.record_trace) {
        trace.splits.insert(trace.splits.end(), result.splits.begin(), result.splits.end());
      }
    }
    std::sort(flagged.begin(), flagged.end());
    timing.refine_seconds = seconds_since(t_refine);

    // (4)-(6) pair generation, assignment, execution
    std::vector<ChunkSummary> flagged_summaries;
    std::map<ChunkId, std::uint64_t> sizes;
    std::map<ChunkId, PointBlock> queried;
    for (ChunkId c : flagged) {
      const auto& s = chunk(c);
      flagged_summaries.push_back(s);
      sizes.emplace(c, s.size_bytes);
      queried.emplace(c, PointBlock::from_rows_in(files_[chunk_file_.at(c)].cells, rows_.at(c), q.range));
    }
    const auto pairs = generate_pairs(flagged_summaries, q, schema_);
    const auto tasks = assign_pairs(pairs, holdings, sizes, nodes_);
    for (const auto& t : tasks) {
      m.network_bytes += t.transfer_bytes;
      const auto& a = queried.at(t.pair.first);
      if (t.pair.first == t.pair.second) {
        m.result_cell_count += similarity_join_cells(a, a, q.shape_radius);
      } else {
        ++m.cross_pairs;
        if (t.transfer_bytes == 0) ++m.collocated_pairs;
        m.result_cell_count += 2 * similarity_join_cells(a, queried.at(t.pair.second), q.shape_radius);
      }
    }
    m.join_tasks = tasks.size();
    m.collocated_pair_fraction =
        m.cross_pairs == 0 ? 1.0
                           : static_cast<double>(m.collocated_pairs) / static_cast<double>(m.cross_pairs);

    // (7) eviction
    auto t_evict = Clock::now();
    const std::vector<ChunkId> kept = plan_kept(q, work, flagged);
    timing.evict_seconds = seconds_since(t_evict);

    // (8) placement
    auto t_place = Clock::now();
    std::vector<ChunkPair> cross;
    for (const auto& p : pairs) {
      if (p.first != p.second) cross.push_back(p);
    }
    std::vector<ChunkId> dropped;
    place(q, kept, holdings, cross, dropped);
    timing.place_seconds = seconds_since(t_place);

    m.total_chunks = total_chunks();
    m.resident_chunks = residency_.size();
    for (const auto& [c, charges] : residency_) {
      for (const auto& ch : charges) m.resident_bytes += ch.bytes;
    }
    last_query_id_ = q.id;
    metrics_.queries.push_back(m);
    timing.pipeline_seconds = seconds_since(start);
    timings_.push_back(timing);
    if (config_.record_trace) {
      trace.tasks = tasks;
      trace.kept = kept;
      trace.dropped = std::move(dropped);
      trace.residency = residency_;
      traces_.push_back(std::move(trace));
    }
    return m;
  }

  ClusterStateData export_state() const {
    ClusterStateData s;
    s.next_chunk_id = ids_.peek();
    s.last_query_id = last_query_id_;
    for (const auto& fc : chunking_) {
      std::vector<ChunkSummary> cs;
      for (const auto& [id, c] : fc.chunks()) cs.push_back(c);
      s.chunks.push_back(std::move(cs));
      s.split_history.push_back(fc.split_history());
    }
    s.residency = residency_;
    s.history = history_;
    s.joins = joins_.entries();
    s.chunk_access = chunk_access_;
    s.file_access = file_access_;
    s.metrics = metrics_;
    return s;
  }

  // Restores coordinator and cache state captured by export_state() on a
  // cluster built over the same files. Chunk membership is recovered from
  // the chunk boxes, which are disjoint and cover every cell of a file.
  void import_state(const ClusterStateData& s) {
    if (s.chunks.size() != files_.size() || s.split_history.size() != files_.size()) {
      throw UsageError("snapshot covers " + std::to_string(s.chunks.size()) + " files, cluster has " +
                       std::to_string(files_.size()));
    }
    rows_.clear();
    chunk_file_.clear();
    chunking_.clear();
    for (std::size_t i = 0; i < files_.size(); ++i) {
      const auto& f = files_[i];
      std::uint64_t covered = 0;
      for (const auto& c : s.chunks[i]) {
        std::vector<std::uint32_t> rows;
        for (std::uint32_t r = 0; r < f.cells.size(); ++r) {
          if (c.box.contains(f.cells.coords(r))) rows.push_back(r);
        }
        if (rows.size() != c.cell_count) {
          throw UsageError("snapshot chunk " + to_string(c.id) + " does not match the raw file cells");
        }
        covered += rows.size();
        rows_.emplace(c.id, std::move(rows));
        chunk_file_.emplace(c.id, i);
      }
      if (covered != f.cells.size()) {
        throw UsageError("snapshot chunks of " + to_string(f.meta.file_id) + " do not cover the file");
      }
      chunking_.emplace_back(f.meta.file_id, schema_.cell_record_bytes(), config_.min_cells, s.chunks[i],
                             s.split_history[i]);
    }
    for (const auto& [c, charges] : s.residency) {
      if (!rows_.contains(c)) throw UsageError("snapshot residency names unknown chunk " + to_string(c));
    }
    ids_ = ChunkIdAllocator(s.next_chunk_id);
    last_query_id_ = s.last_query_id;
    residency_ = s.residency;
    history_ = s.history;
    joins_ = JoinHistory();
    joins_.mutable_entries() = s.joins;
    chunk_access_ = s.chunk_access;
    file_access_ = s.file_access;
    metrics_ = s.metrics;
    timings_.clear();
    traces_.clear();
  }

 private:
  static double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
  }

  std::size_t index_of(const FileId& f) const {
    auto it = file_index_.find(f);
    if (it == file_index_.end()) throw UsageError("unknown file " + to_string(f));
    return it->second;
  }

  NodeId origin_of(ChunkId c) const { return files_[chunk_file_.at(c)].meta.file_id.node; }

  void validate_query(const QuerySpec& q) const {
    if (q.range.rank() != schema_.rank()) throw UsageError("query rank does not match the schema");
    if (!schema_.domain().contains(q.range)) throw UsageError("query range lies outside the schema");
    if (q.id <= last_query_id_) {
      throw UsageError("query ids must be strictly increasing (got " + std::to_string(q.id) + " after " +
                       std::to_string(last_query_id_) + ")");
    }
  }

  // Replaces a split parent everywhere the coordinator references it. Pieces
  // that no longer overlap the query are dropped from the cache.
  void apply_split(const SplitRecord& s, Holdings& holdings, const std::set<ChunkId>& discarded) {
    std::vector<ChunkId> children;
    for (ChunkId c : {s.lower, s.upper}) {
      if (!discarded.contains(c)) children.push_back(c);
    }
    // Children sit wherever a full copy of the parent was; a parent that was
    // only present as a striped cache entry hands its children to its home.
    std::vector<NodeId> at;
    if (auto h = holdings.find(s.parent); h != holdings.end()) {
      const auto parent_size = rows_.at(s.parent).size() * schema_.cell_record_bytes();
      for (const auto& [n, bytes] : h->second) {
        if (bytes >= parent_size) at.push_back(n);
      }
      if (at.empty()) {
        if (auto r = residency_.find(s.parent); r != residency_.end()) at.push_back(r->second.front().node);
      }
      holdings.erase(h);
    }
    for (ChunkId c : children) {
      const auto bytes = rows_.at(c).size() * schema_.cell_record_bytes();
      for (NodeId n : at) holdings[c][n] = bytes;
    }
    residency_.erase(s.parent);
    rows_.erase(s.parent);
    chunk_file_.erase(s.parent);

    for (auto& t : history_) {
      auto it = std::find_if(t.chunks.begin(), t.chunks.end(),
                             [&](const ChunkRef& r) { return r.id == s.parent; });
      if (it == t.chunks.end()) continue;
      t.chunks.erase(it);
      for (ChunkId c : children) t.chunks.push_back({c, rows_.at(c).size() * schema_.cell_record_bytes()});
      std::sort(t.chunks.begin(), t.chunks.end(),
                [](const ChunkRef& a, const ChunkRef& b) { return a.id < b.id; });
    }
    joins_.remap(s.parent, children);
    if (auto a = chunk_access_.find(s.parent); a != chunk_access_.end()) {
      const auto last = a->second;
      chunk_access_.erase(a);
      for (ChunkId c : children) chunk_access_[c] = last;
    }
  }

  template <typename Work>
  std::vector<ChunkId> plan_kept(const QuerySpec& q, const std::vector<Work>& work,
                                 const std::vector<ChunkId>& flagged) {
    const bool local = config_.budgeting == BudgetMode::kLocal;
    std::vector<ChunkId> kept;
    switch (config_.policy) {
      case Policy::kCost: {
        std::map<std::size_t, std::vector<ChunkRef>> by_file;
        for (ChunkId c : flagged) by_file[chunk_file_.at(c)].push_back({c, chunk(c).size_bytes});
        std::vector<CacheTriple> current;
        for (auto& [i, refs] : by_file) current.push_back({q.id, files_[i].meta.file_id, std::move(refs)});
        std::vector<CacheTriple> next_history;
        for (const auto& [budget, node] : budget_scopes(local)) {
          auto in_scope = [&](const CacheTriple& t) { return !node || t.file.node == *node; };
          std::vector<CacheTriple> h, cur;
          std::copy_if(history_.begin(), history_.end(), std::back_inserter(h), in_scope);
          std::copy_if(current.begin(), current.end(), std::back_inserter(cur), in_scope);
          auto plan = plan_eviction(h, cur, budget, q.id, config_.weights, file_meta_);
          kept.insert(kept.end(), plan.kept_chunks.begin(), plan.kept_chunks.end());
          next_history.insert(next_history.end(), plan.keep.begin(), plan.keep.end());
        }
        history_ = std::move(next_history);
        break;
      }
      case Policy::kChunkLru: {
        for (ChunkId c : flagged) chunk_access_[c] = q.id;
        for (const auto& [budget, node] : budget_scopes(local)) {
          std::vector<LruEntry<ChunkId>> resident, accessed;
          for (const auto& [c, charges] : residency_) {
            if (!node || origin_of(c) == *node) resident.push_back({c, chunk(c).size_bytes, chunk_access_[c]});
          }
          for (ChunkId c : flagged) {
            if (!node || origin_of(c) == *node) accessed.push_back({c, chunk(c).size_bytes, q.id});
          }
          auto plan = plan_eviction_chunk_lru(resident, accessed, budget);
          kept.insert(kept.end(), plan.keep.begin(), plan.keep.end());
        }
        for (auto it = chunk_access_.begin(); it != chunk_access_.end();) {
          it = rows_.contains(it->first) ? std::next(it) : chunk_access_.erase(it);
        }
        break;
      }
      case Policy::kFileLru: {
        for (const auto& w : work) file_access_[files_[w.index].meta.file_id] = q.id;
        auto root_of = [&](std::size_t i) { return chunking_[i].chunks().begin()->first; };
        for (const auto& [budget, node] : budget_scopes(local)) {
          std::vector<LruEntry<FileId>> resident, accessed;
          for (std::size_t i = 0; i < files_.size(); ++i) {
            const auto& id = files_[i].meta.file_id;
            if (node && id.node != *node) continue;
            if (residency_.contains(root_of(i))) {
              resident.push_back({id, chunk(root_of(i)).size_bytes, file_access_[id]});
            }
          }
          for (const auto& w : work) {
            const auto& id = files_[w.index].meta.file_id;
            if (!node || id.node == *node) accessed.push_back({id, chunk(root_of(w.index)).size_bytes, q.id});
          }
          auto plan = plan_eviction_file_lru(resident, accessed, budget);
          for (const auto& f : plan.keep) kept.push_back(root_of(index_of(f)));
        }
        break;
      }
    }
    std::sort(kept.begin(), kept.end());
    return kept;
  }

  // (budget, node) pairs: one cluster-wide scope, or one scope per node.
  std::vector<std::pair<std::uint64_t, std::optional<NodeId>>> budget_scopes(bool local) const {
    std::vector<std::pair<std::uint64_t, std::optional<NodeId>>> out;
    if (!local) {
      out.emplace_back(total_budget(), std::nullopt);
    } else {
      for (NodeId n : nodes_) out.emplace_back(config_.budget_of(n), n);
    }
    return out;
  }

  void place(const QuerySpec& q, const std::vector<ChunkId>& kept, const Holdings& holdings,
             const std::vector<ChunkPair>& cross, std::vector<ChunkId>& dropped) {
    std::map<NodeId, std::uint64_t> budgets;
    for (NodeId n : nodes_) budgets[n] = config_.budget_of(n);
    std::map<ChunkId, std::uint64_t> sizes;
    for (ChunkId c : kept) sizes[c] = chunk(c).size_bytes;

    PlacementPlan plan;
    if (config_.budgeting == BudgetMode::kLocal) {
      std::map<NodeId, std::uint64_t> remaining = budgets;
      for (ChunkId c : kept) {
        const NodeId n = origin_of(c);
        if (remaining[n] >= sizes[c]) {
          remaining[n] -= sizes[c];
          plan.home[c] = n;
          plan.charges[c] = {{n, sizes[c]}};
        } else {
          plan.dropped.push_back(c);
        }
      }
    } else if (config_.policy == Policy::kCost && config_.placement) {
      joins_.add(q.id, cross);
      joins_.purge(q.id, config_.weights.window);
      PlacementState state;
      state.budgets = budgets;
      state.sizes = sizes;
      for (ChunkId c : kept) {
        std::vector<NodeId> replicas;
        if (auto h = holdings.find(c); h != holdings.end()) {
          for (const auto& [n, bytes] : h->second) {
            if (bytes >= sizes[c]) replicas.push_back(n);
          }
        }
        if (replicas.empty()) replicas.push_back(current_home(c));
        state.locations.emplace(c, std::move(replicas));
      }
      plan = plan_placement(state, joins_, q.id, config_.weights);
    } else {
      std::vector<std::pair<ChunkId, NodeId>> preferred;
      for (ChunkId c : kept) {
        if (residency_.contains(c)) preferred.emplace_back(c, current_home(c));
      }
      for (ChunkId c : kept) {
        if (!residency_.contains(c)) preferred.emplace_back(c, origin_of(c));
      }
      plan = plan_static_placement(preferred, sizes, budgets);
    }
    residency_ = std::move(plan.charges);
    dropped = std::move(plan.dropped);

    // The cost policy's state holds cached chunks only.
    for (auto& t : history_) {
      std::erase_if(t.chunks, [&](const ChunkRef& r) { return !residency_.contains(r.id); });
    }
    std::erase_if(history_, [](const CacheTriple& t) { return t.chunks.empty(); });
  }

  NodeId current_home(ChunkId c) const {
    auto it = residency_.find(c);
    return it == residency_.end() ? origin_of(c) : it->second.front().node;
  }

  ArraySchema schema_;
  std::vector<RawFile> files_;
  ClusterConfig config_;
  std::vector<NodeId> nodes_;
  std::map<FileId, std::size_t> file_index_;
  FileMetaMap file_meta_;
  std::vector<FileChunking> chunking_;
  ChunkIdAllocator ids_;
  // Simulation bookkeeping: file rows of every live chunk. Equal to the
  // file cells inside the chunk box.
  std::unordered_map<ChunkId, std::vector<std::uint32_t>> rows_;
  std::unordered_map<ChunkId, std::size_t> chunk_file_;
  std::map<ChunkId, std::vector<NodeCharge>> residency_;
  std::vector<CacheTriple> history_;
  JoinHistory joins_;
  std::map<ChunkId, std::uint64_t> chunk_access_;
  std::map<FileId, std::uint64_t> file_access_;
  std::uint64_t last_query_id_ = 0;
  MetricsLog metrics_;
  std::vector<QueryTiming> timings_;
  std::vector<QueryTrace> traces_;
};

}  // namespace arraycache

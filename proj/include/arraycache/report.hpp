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

// Run reports, policy comparisons, and cluster snapshots as JSON, plus the
// flat CSV form of per-query metrics. Requires nlohmann/json on the include
// path. Nothing here records wall-clock time, so equal runs serialize to
// equal bytes.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arraycache/cache_policy.hpp"
#include "arraycache/cluster.hpp"
#include "arraycache/errors.hpp"
#include "arraycache/io.hpp"

namespace arraycache {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::vector<std::string> data;  // manifest, directory, or raw files
  std::string schema;
  std::string workload;
  Policy policy = Policy::kCost;
  std::uint32_t nodes = 1;
  std::uint64_t budget_per_node = 0;
  std::uint64_t min_cells = kDefaultMinCells;
  double decay_base = 2.0;
  std::uint32_t window = 16;
  std::uint64_t seed = 0;
  std::string out;
  bool placement = true;
  BudgetMode budgeting = BudgetMode::kDistributed;

  void validate() const {
    if (nodes == 0) throw UsageError("--nodes must be >= 1");
    if (min_cells == 0) throw UsageError("--min-cells must be >= 1");
    if (window == 0) throw UsageError("--window must be >= 1");
    if (!(decay_base > 1.0)) throw UsageError("--decay-base must be > 1");
  }

  ClusterConfig cluster_config() const {
    ClusterConfig c;
    c.nodes = nodes;
    c.budget_per_node = budget_per_node;
    c.min_cells = min_cells;
    c.weights.decay_base = decay_base;
    c.weights.window = window;
    c.policy = policy;
    c.placement = placement;
    c.budgeting = budgeting;
    return c;
  }
};

inline std::string budgeting_name(BudgetMode m) { return m == BudgetMode::kLocal ? "local" : "distributed"; }

inline BudgetMode parse_budgeting(const std::string& s) {
  if (s == "distributed") return BudgetMode::kDistributed;
  if (s == "local") return BudgetMode::kLocal;
  throw UsageError("unknown budgeting mode '" + s + "' (expected distributed or local)");
}

inline Json to_json(const RunConfig& c) {
  return Json{{"data", c.data},
              {"schema", c.schema},
              {"workload", c.workload},
              {"policy", policy_name(c.policy)},
              {"nodes", c.nodes},
              {"budget_per_node", c.budget_per_node},
              {"min_cells", c.min_cells},
              {"decay_base", c.decay_base},
              {"window", c.window},
              {"seed", c.seed},
              {"placement", c.placement},
              {"budgeting", budgeting_name(c.budgeting)}};
}

inline Json box_json(const BoundingBox& b) { return Json{{"lo", b.lo()}, {"hi", b.hi()}}; }

inline BoundingBox box_from_json(const Json& j) {
  return BoundingBox(j.at("lo").get<std::vector<Coord>>(), j.at("hi").get<std::vector<Coord>>());
}

inline Json to_json(const WorkloadTrace& w) {
  Json queries = Json::array();
  for (const auto& q : w.queries) {
    queries.push_back(Json{{"id", q.id}, {"lo", q.range.lo()}, {"hi", q.range.hi()}, {"radius", q.shape_radius}});
  }
  return Json{{"pattern", w.pattern}, {"seed", w.seed}, {"queries", std::move(queries)}};
}

inline Json to_json(const QueryMetrics& m) {
  return Json{{"query_id", m.query_id},
              {"files_scanned", m.files_scanned},
              {"bytes_scanned", m.bytes_scanned},
              {"network_bytes", m.network_bytes},
              {"cache_hit_chunks", m.cache_hit_chunks},
              {"cache_miss_chunks", m.cache_miss_chunks},
              {"cross_pairs", m.cross_pairs},
              {"collocated_pairs", m.collocated_pairs},
              {"collocated_pair_fraction", m.collocated_pair_fraction},
              {"result_cell_count", m.result_cell_count},
              {"join_tasks", m.join_tasks},
              {"splits", m.splits},
              {"total_chunks", m.total_chunks},
              {"resident_chunks", m.resident_chunks},
              {"resident_bytes", m.resident_bytes}};
}

inline QueryMetrics metrics_from_json(const Json& j) {
  QueryMetrics m;
  m.query_id = j.at("query_id");
  m.files_scanned = j.at("files_scanned");
  m.bytes_scanned = j.at("bytes_scanned");
  m.network_bytes = j.at("network_bytes");
  m.cache_hit_chunks = j.at("cache_hit_chunks");
  m.cache_miss_chunks = j.at("cache_miss_chunks");
  m.cross_pairs = j.at("cross_pairs");
  m.collocated_pairs = j.at("collocated_pairs");
  m.collocated_pair_fraction = j.at("collocated_pair_fraction");
  m.result_cell_count = j.at("result_cell_count");
  m.join_tasks = j.at("join_tasks");
  m.splits = j.at("splits");
  m.total_chunks = j.at("total_chunks");
  m.resident_chunks = j.at("resident_chunks");
  m.resident_bytes = j.at("resident_bytes");
  return m;
}

// ---------------------------------------------------------------------------
// Running a workload.

struct RunResult {
  MetricsLog metrics;
  std::vector<std::string> files;                       // file ids, cluster order
  std::vector<std::vector<std::uint64_t>> chunk_counts;  // [query][file]
};

inline RunResult run_workload(Cluster& cluster, const WorkloadTrace& workload,
                              const std::function<void(const QueryMetrics&)>& on_query = {}) {
  RunResult r;
  for (const auto& f : cluster.files()) r.files.push_back(to_string(f.meta.file_id));
  for (const auto& q : workload.queries) {
    const auto m = cluster.run_query(q);
    std::vector<std::uint64_t> counts;
    for (const auto& f : cluster.files()) counts.push_back(cluster.chunking(f.meta.file_id).chunks().size());
    r.chunk_counts.push_back(std::move(counts));
    if (on_query) on_query(m);
  }
  r.metrics = cluster.metrics();
  return r;
}

inline Json build_report(const RunConfig& config, const WorkloadTrace& workload, const RunResult& run) {
  Json rows = Json::array();
  for (const auto& m : run.metrics.queries) rows.push_back(to_json(m));
  return Json{{"format", "arraycache-report"},
              {"version", 1},
              {"config", to_json(config)},
              {"workload", to_json(workload)},
              {"queries", std::move(rows)},
              {"totals", to_json(run.metrics.totals())},
              {"chunking", Json{{"files", run.files}, {"chunks_per_query", run.chunk_counts}}}};
}

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "query_id",          "files_scanned",   "bytes_scanned",  "network_bytes",
      "cache_hit_chunks",  "cache_miss_chunks", "cross_pairs",  "collocated_pairs",
      "collocated_pair_fraction", "result_cell_count", "join_tasks", "splits",
      "total_chunks",      "resident_chunks", "resident_bytes"};
  return cols;
}

inline void write_metrics_csv(std::ostream& out, const MetricsLog& log) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& m : log.queries) {
    const Json j = to_json(m);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out << ',';
      const auto& v = j.at(cols[i]);
      if (v.is_number_float()) {
        out << detail::format_double(v.get<double>());
      } else {
        out << v.get<std::uint64_t>();
      }
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Comparison against a baseline report.

// a / b with 0/0 = 1; a positive value over zero has no finite ratio (null).
inline Json ratio(double a, double b) {
  if (b == 0.0) return a == 0.0 ? Json(1.0) : Json(nullptr);
  return Json(a / b);
}

inline Json compare_reports(const std::vector<Json>& reports) {
  if (reports.size() < 2) throw UsageError("compare needs at least two reports");
  const Json& base = reports.front();
  for (const auto& r : reports) {
    if (!r.contains("workload") || !r.contains("queries")) throw UsageError("not a run report");
    if (r.at("workload").at("queries") != base.at("workload").at("queries")) {
      throw UsageError("reports were produced from different workloads");
    }
  }
  static const char* const kMetrics[] = {"bytes_scanned", "network_bytes", "collocated_pair_fraction"};
  auto label = [](const Json& r) {
    const auto& c = r.at("config");
    std::string s = c.at("policy").get<std::string>();
    if (!c.at("placement").get<bool>()) s += "/no-placement";
    if (c.at("budgeting") != "distributed") s += "/" + c.at("budgeting").get<std::string>();
    return s + "@" + std::to_string(c.at("budget_per_node").get<std::uint64_t>());
  };

  Json out{{"baseline", label(base)}, {"comparisons", Json::array()}};
  for (std::size_t k = 1; k < reports.size(); ++k) {
    const Json& r = reports[k];
    Json per_query = Json::array();
    for (std::size_t i = 0; i < r.at("queries").size(); ++i) {
      Json row{{"query_id", r.at("queries")[i].at("query_id")}};
      for (const char* m : kMetrics) {
        row[m] = ratio(r.at("queries")[i].at(m).get<double>(), base.at("queries")[i].at(m).get<double>());
      }
      per_query.push_back(std::move(row));
    }
    Json totals;
    for (const char* m : kMetrics) {
      totals[m] = ratio(r.at("totals").at(m).get<double>(), base.at("totals").at(m).get<double>());
    }
    out["comparisons"].push_back(
        Json{{"policy", label(r)}, {"per_query", std::move(per_query)}, {"cumulative", std::move(totals)}});
  }
  return out;
}

inline void write_comparison_table(std::ostream& out, const Json& cmp) {
  auto cell = [](const Json& v) {
    if (v.is_null()) return std::string("inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v.get<double>());
    return std::string(buf);
  };
  out << "baseline: " << cmp.at("baseline").get<std::string>() << '\n';
  for (const auto& c : cmp.at("comparisons")) {
    out << '\n' << c.at("policy").get<std::string>() << " vs baseline\n";
    out << "query  bytes_scanned  network_bytes  collocated_fraction\n";
    for (const auto& row : c.at("per_query")) {
      char line[128];
      std::snprintf(line, sizeof line, "%5llu  %13s  %13s  %19s\n",
                    static_cast<unsigned long long>(row.at("query_id").get<std::uint64_t>()),
                    cell(row.at("bytes_scanned")).c_str(), cell(row.at("network_bytes")).c_str(),
                    cell(row.at("collocated_pair_fraction")).c_str());
      out << line;
    }
    const auto& t = c.at("cumulative");
    char line[128];
    std::snprintf(line, sizeof line, "  all  %13s  %13s  %19s\n", cell(t.at("bytes_scanned")).c_str(),
                  cell(t.at("network_bytes")).c_str(), cell(t.at("collocated_pair_fraction")).c_str());
    out << line;
  }
}

// ---------------------------------------------------------------------------
// Snapshots.

inline Json file_id_json(const FileId& f) { return Json::array({to_underlying(f.node), f.index}); }

inline FileId file_id_from_json(const Json& j) {
  return FileId{NodeId{j.at(0).get<std::uint32_t>()}, j.at(1).get<std::uint32_t>()};
}

inline Json to_json(const ClusterStateData& s) {
  Json chunks = Json::array();
  for (const auto& per_file : s.chunks) {
    Json arr = Json::array();
    for (const auto& c : per_file) {
      Json j{{"id", to_underlying(c.id)},
             {"file", file_id_json(c.file)},
             {"box", box_json(c.box)},
             {"cells", c.cell_count},
             {"bytes", c.size_bytes}};
      j["parent"] = c.parent ? Json(to_underlying(*c.parent)) : Json(nullptr);
      arr.push_back(std::move(j));
    }
    chunks.push_back(std::move(arr));
  }
  Json splits = Json::array();
  for (const auto& per_file : s.split_history) {
    Json arr = Json::array();
    for (const auto& r : per_file) {
      arr.push_back(Json::array({r.query_id, to_underlying(r.parent), to_underlying(r.lower), to_underlying(r.upper)}));
    }
    splits.push_back(std::move(arr));
  }
  Json residency = Json::array();
  for (const auto& [c, charges] : s.residency) {
    Json ch = Json::array();
    for (const auto& x : charges) ch.push_back(Json::array({to_underlying(x.node), x.bytes}));
    residency.push_back(Json{{"chunk", to_underlying(c)}, {"charges", std::move(ch)}});
  }
  Json history = Json::array();
  for (const auto& t : s.history) {
    Json cs = Json::array();
    for (const auto& c : t.chunks) cs.push_back(Json::array({to_underlying(c.id), c.bytes}));
    history.push_back(Json{{"query", t.query_id}, {"file", file_id_json(t.file)}, {"chunks", std::move(cs)}});
  }
  Json joins = Json::array();
  for (const auto& e : s.joins) {
    Json ps = Json::array();
    for (const auto& [a, b] : e.pairs) ps.push_back(Json::array({to_underlying(a), to_underlying(b)}));
    joins.push_back(Json{{"query", e.query_id}, {"pairs", std::move(ps)}});
  }
  Json chunk_access = Json::array();
  for (const auto& [c, q] : s.chunk_access) chunk_access.push_back(Json::array({to_underlying(c), q}));
  Json file_access = Json::array();
  for (const auto& [f, q] : s.file_access) file_access.push_back(Json{{"file", file_id_json(f)}, {"query", q}});
  Json metrics = Json::array();
  for (const auto& m : s.metrics.queries) metrics.push_back(to_json(m));
  return Json{{"format", "arraycache-snapshot"},
              {"version", 1},
              {"next_chunk_id", s.next_chunk_id},
              {"last_query_id", s.last_query_id},
              {"chunks", std::move(chunks)},
              {"split_history", std::move(splits)},
              {"residency", std::move(residency)},
              {"history", std::move(history)},
              {"joins", std::move(joins)},
              {"chunk_access", std::move(chunk_access)},
              {"file_access", std::move(file_access)},
              {"metrics", std::move(metrics)}};
}

inline ClusterStateData snapshot_from_json(const Json& j) {
  if (j.value("format", "") != "arraycache-snapshot" || j.value("version", 0) != 1) {
    throw IngestError("not a version 1 arraycache snapshot");
  }
  ClusterStateData s;
  try {
    s.next_chunk_id = j.at("next_chunk_id");
    s.last_query_id = j.at("last_query_id");
    for (const auto& per_file : j.at("chunks")) {
      std::vector<ChunkSummary> cs;
      for (const auto& c : per_file) {
        ChunkSummary x;
        x.id = ChunkId{c.at("id").get<std::uint64_t>()};
        x.file = file_id_from_json(c.at("file"));
        x.box = box_from_json(c.at("box"));
        x.cell_count = c.at("cells");
        x.size_bytes = c.at("bytes");
        if (!c.at("parent").is_null()) x.parent = ChunkId{c.at("parent").get<std::uint64_t>()};
        cs.push_back(std::move(x));
      }
      s.chunks.push_back(std::move(cs));
    }
    for (const auto& per_file : j.at("split_history")) {
      std::vector<SplitRecord> rs;
      for (const auto& r : per_file) {
        rs.push_back({r.at(0).get<std::uint64_t>(), ChunkId{r.at(1).get<std::uint64_t>()},
                      ChunkId{r.at(2).get<std::uint64_t>()}, ChunkId{r.at(3).get<std::uint64_t>()}});
      }
      s.split_history.push_back(std::move(rs));
    }
    for (const auto& r : j.at("residency")) {
      std::vector<NodeCharge> charges;
      for (const auto& x : r.at("charges")) {
        charges.push_back({NodeId{x.at(0).get<std::uint32_t>()}, x.at(1).get<std::uint64_t>()});
      }
      s.residency.emplace(ChunkId{r.at("chunk").get<std::uint64_t>()}, std::move(charges));
    }
    for (const auto& t : j.at("history")) {
      CacheTriple ct{t.at("query").get<std::uint64_t>(), file_id_from_json(t.at("file")), {}};
      for (const auto& c : t.at("chunks")) {
        ct.chunks.push_back({ChunkId{c.at(0).get<std::uint64_t>()}, c.at(1).get<std::uint64_t>()});
      }
      s.history.push_back(std::move(ct));
    }
    for (const auto& e : j.at("joins")) {
      JoinHistory::Entry entry{e.at("query").get<std::uint64_t>(), {}};
      for (const auto& p : e.at("pairs")) {
        entry.pairs.emplace_back(ChunkId{p.at(0).get<std::uint64_t>()}, ChunkId{p.at(1).get<std::uint64_t>()});
      }
      s.joins.push_back(std::move(entry));
    }
    for (const auto& a : j.at("chunk_access")) {
      s.chunk_access.emplace(ChunkId{a.at(0).get<std::uint64_t>()}, a.at(1).get<std::uint64_t>());
    }
    for (const auto& a : j.at("file_access")) {
      s.file_access.emplace(file_id_from_json(a.at("file")), a.at("query").get<std::uint64_t>());
    }
    for (const auto& m : j.at("metrics")) s.metrics.queries.push_back(metrics_from_json(m));
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("malformed snapshot: ") + e.what());
  } catch (const UsageError& e) {
    throw IngestError(std::string("malformed snapshot: ") + e.what());
  }
  return s;
}

}  // namespace arraycache

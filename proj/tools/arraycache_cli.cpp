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

// Command-line front end: generate datasets and workloads, run a workload
// through the cluster simulator, and compare run reports.
//
// Exit codes: 0 success, 1 internal failure, 2 usage error, 3 data error.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "arraycache/cluster.hpp"
#include "arraycache/errors.hpp"
#include "arraycache/io.hpp"
#include "arraycache/report.hpp"

namespace fs = std::filesystem;
using namespace arraycache;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

constexpr const char* kManifestName = "dataset.json";

void init_logging() {
  auto logger = spdlog::stderr_color_mt("arraycache");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ARRAYCACHE_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honor real names.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

std::vector<Coord> parse_tuple(const std::string& s, std::size_t rank, const char* what) {
  std::vector<Coord> out;
  for (auto f : detail::split(s, ',')) {
    Coord v;
    if (!detail::parse_number(f, v)) throw UsageError(std::string("bad ") + what + " '" + s + "'");
    out.push_back(v);
  }
  if (out.size() != rank) throw UsageError(std::string(what) + " needs " + std::to_string(rank) + " values");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// gen

struct GenOptions {
  std::string out;
  std::string schema;
  std::string dims = "1:1000,1:1000";
  std::string attrs = "value:float";
  std::uint64_t points = 10'000;
  std::uint32_t files = 10;
  std::string skew = "gaussian-cluster";
  double sigma = 10.0;
  std::uint32_t clusters = 0;
  std::string arrival = "interleaved";
  std::string format = "sabf";
  std::uint64_t seed = 1;
  std::string pattern = "shifting-return";
  std::size_t queries = 10;
  std::string query_lo;
  std::string query_hi;
  std::string shift;
  std::uint64_t radius = 1;
};

ArraySchema schema_from_flags(const GenOptions& o) {
  std::vector<DimSpec> dims;
  int n = 0;
  for (auto d : detail::split(o.dims, ',')) {
    const auto parts = detail::split(d, ':');
    DimSpec spec{"d" + std::to_string(n++)};
    if (parts.size() != 2 || !detail::parse_number(parts[0], spec.lo) || !detail::parse_number(parts[1], spec.hi)) {
      throw UsageError("--dims expects lo:hi[,lo:hi...]");
    }
    dims.push_back(std::move(spec));
  }
  std::vector<AttrSpec> attrs;
  if (!o.attrs.empty()) {
    for (auto a : detail::split(o.attrs, ',')) {
      const auto parts = detail::split(a, ':');
      if (parts.size() != 2 || (parts[1] != "int" && parts[1] != "float")) {
        throw UsageError("--attrs expects name:int|float[,...]");
      }
      attrs.push_back({std::string(parts[0]), parts[1] == "int" ? AttrKind::kInt : AttrKind::kFloat});
    }
  }
  return ArraySchema(std::move(dims), std::move(attrs));
}

int cmd_gen(const GenOptions& o) {
  if (o.files == 0) throw UsageError("--files must be >= 1");
  if (o.format != "sabf" && o.format != "csv") throw UsageError("--format must be sabf or csv");
  const ArraySchema schema = o.schema.empty() ? schema_from_flags(o) : read_schema(o.schema);

  SyntheticParams p;
  p.n_points = o.points;
  p.n_files = o.files;
  p.skew = parse_skew(o.skew);
  p.sigma = o.sigma;
  p.clusters = o.clusters;
  p.arrival = parse_arrival(o.arrival);
  p.seed = o.seed;

  // Query geometry defaults to a box a tenth of the domain wide per side,
  // shifted by half its width.
  const auto domain = schema.domain();
  std::vector<Coord> lo(schema.rank()), hi(schema.rank()), shift(schema.rank());
  for (std::size_t k = 0; k < schema.rank(); ++k) {
    const Coord extent = std::max<Coord>(1, (domain.hi(k) - domain.lo(k) + 1) / 10);
    lo[k] = domain.lo(k);
    hi[k] = std::min(domain.hi(k), domain.lo(k) + extent - 1);
    shift[k] = k == 0 ? std::max<Coord>(1, extent / 2) : 0;
  }
  if (!o.query_lo.empty()) lo = parse_tuple(o.query_lo, schema.rank(), "--query-lo");
  if (!o.query_hi.empty()) hi = parse_tuple(o.query_hi, schema.rank(), "--query-hi");
  if (!o.shift.empty()) shift = parse_tuple(o.shift, schema.rank(), "--shift");
  WorkloadParams wp{BoundingBox(lo, hi), shift, o.queries, o.radius};
  const auto workload = generate_workload(parse_pattern(o.pattern), wp, schema, o.seed);

  const auto parts = generate_synthetic_dataset(schema, p);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  {
    std::ostringstream s;
    write_schema(s, schema);
    write_text(dir / "schema.txt", s.str());
  }
  Json files = Json::array();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "part-%05zu.%s", i, o.format.c_str());
    if (o.format == "sabf") {
      write_text(dir / name, encode_sabf(parts[i], schema));
    } else {
      std::ostringstream s;
      write_csv(s, parts[i]);
      write_text(dir / name, s.str());
    }
    files.push_back(name);
  }
  {
    std::ostringstream s;
    write_workload(s, workload);
    write_text(dir / "workload.txt", s.str());
  }
  const Json manifest{{"format", "arraycache-dataset"},
                      {"version", 1},
                      {"schema", "schema.txt"},
                      {"workload", "workload.txt"},
                      {"files", std::move(files)},
                      {"generator",
                       Json{{"points", o.points},
                            {"files", o.files},
                            {"skew", o.skew},
                            {"sigma", o.sigma},
                            {"clusters", o.clusters},
                            {"arrival", o.arrival},
                            {"seed", o.seed},
                            {"pattern", o.pattern},
                            {"queries", o.queries}}}};
  write_text(dir / kManifestName, manifest.dump(2) + "\n");
  std::cout << manifest.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// run

struct RunOptions {
  RunConfig config;
  std::string policy = "cost";
  std::string budgeting = "distributed";
  bool no_placement = false;
  std::string snapshot;
  std::string restore;
};

struct Dataset {
  std::optional<fs::path> schema;
  std::vector<fs::path> files;
};

Dataset resolve_data(const std::vector<std::string>& data) {
  Dataset d;
  if (data.size() == 1) {
    fs::path p(data.front());
    if (fs::is_directory(p)) p /= kManifestName;
    if (p.extension() == ".json") {
      const Json m = read_json(p);
      if (m.value("format", "") != "arraycache-dataset") throw IngestError(p.string() + " is not a dataset manifest");
      const auto base = p.parent_path();
      if (m.contains("schema")) d.schema = base / m.at("schema").get<std::string>();
      for (const auto& f : m.at("files")) d.files.push_back(base / f.get<std::string>());
      return d;
    }
  }
  for (const auto& f : data) d.files.emplace_back(f);
  return d;
}

int cmd_run(RunOptions& o) {
  RunConfig& c = o.config;
  c.policy = parse_policy(o.policy);
  c.budgeting = parse_budgeting(o.budgeting);
  c.placement = !o.no_placement;
  c.validate();

  const Dataset data = resolve_data(c.data);
  if (data.files.empty()) throw UsageError("--data names no raw files");
  fs::path schema_path;
  if (!c.schema.empty()) {
    schema_path = c.schema;
  } else if (data.schema) {
    schema_path = *data.schema;
  } else {
    throw UsageError("--schema is required when --data lists raw files");
  }
  const ArraySchema schema = read_schema(schema_path);
  const WorkloadTrace workload = read_workload(c.workload, schema);

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<RawFile> files;
  for (std::size_t i = 0; i < data.files.size(); ++i) {
    const FileId id{NodeId{static_cast<std::uint32_t>(i % c.nodes)}, static_cast<std::uint32_t>(i / c.nodes)};
    auto scanned = scan_file(data.files[i], schema, id);
    spdlog::debug("loaded {} as {}: {} cells, {} bytes", data.files[i].string(), to_string(id),
                  scanned.meta.cell_count, scanned.meta.file_bytes);
    files.push_back({std::move(scanned.meta), std::move(scanned.cells)});
  }

  Cluster cluster(schema, std::move(files), c.cluster_config());
  if (!o.restore.empty()) cluster.import_state(snapshot_from_json(read_json(o.restore)));
  const auto result = run_workload(cluster, workload, [](const QueryMetrics& m) {
    spdlog::info("query {}: scanned {} files / {} bytes, network {} bytes, {} result cells", m.query_id,
                 m.files_scanned, m.bytes_scanned, m.network_bytes, m.result_cell_count);
  });
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  spdlog::info("run finished in {:.3f} s wall-clock", elapsed);

  const Json report = build_report(c, workload, result);
  if (c.out.empty()) {
    std::cout << report.dump(2) << '\n';
  } else {
    fs::path out(c.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_text(out, report.dump(2) + "\n");
    std::ostringstream csv;
    write_metrics_csv(csv, result.metrics);
    write_text(fs::path(out).replace_extension(".csv"), csv.str());
  }
  if (!o.snapshot.empty()) write_text(o.snapshot, to_json(cluster.export_state()).dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// compare

int cmd_compare(const std::vector<std::string>& paths, const std::string& out) {
  std::vector<Json> reports;
  for (const auto& p : paths) reports.push_back(read_json(p));
  const Json cmp = compare_reports(reports);
  write_comparison_table(std::cout, cmp);
  if (!out.empty()) write_text(out, cmp.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Cost-based distributed caching simulator for raw sparse arrays"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic dataset and workload");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--schema", gen.schema, "Schema descriptor to use instead of --dims/--attrs");
  g->add_option("--dims", gen.dims, "Dimension ranges, lo:hi[,lo:hi...]");
  g->add_option("--attrs", gen.attrs, "Attributes, name:int|float[,...]");
  g->add_option("--points", gen.points, "Number of generated points");
  g->add_option("--files", gen.files, "Number of raw files");
  g->add_option("--skew", gen.skew, "uniform or gaussian-cluster");
  g->add_option("--sigma", gen.sigma, "Gaussian spread in cells");
  g->add_option("--clusters", gen.clusters, "Cluster count (0 picks one per 10,000 points)");
  g->add_option("--arrival", gen.arrival, "interleaved or clustered");
  g->add_option("--format", gen.format, "sabf or csv");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--pattern", gen.pattern, "shifting, alternating, shifting-return or uniform-random");
  g->add_option("--queries", gen.queries, "Workload length");
  g->add_option("--query-lo", gen.query_lo, "First query range lower corner");
  g->add_option("--query-hi", gen.query_hi, "First query range upper corner");
  g->add_option("--shift", gen.shift, "Per-step range translation");
  g->add_option("--radius", gen.radius, "L1 similarity radius");

  RunOptions run;
  auto* r = app.add_subcommand("run", "Run a workload and write a report");
  r->add_option("--data", run.config.data, "Dataset manifest, dataset directory, or raw files")->required();
  r->add_option("--schema", run.config.schema, "Schema descriptor");
  r->add_option("--workload", run.config.workload, "Workload trace")->required();
  r->add_option("--policy", run.policy, "cost, chunk-lru or file-lru");
  r->add_option("--nodes", run.config.nodes, "Number of nodes");
  r->add_option("--budget-per-node", run.config.budget_per_node, "Cache bytes per node (k/m/g suffixes)")
      ->transform(CLI::AsSizeValue(false));
  r->add_option("--min-cells", run.config.min_cells, "Split threshold in cells");
  r->add_option("--decay-base", run.config.decay_base, "Query weight decay base");
  r->add_option("--window", run.config.window, "Query history window");
  r->add_option("--seed", run.config.seed, "Seed echoed into the report");
  r->add_option("--out", run.config.out, "Report path (JSON); a CSV is written beside it");
  r->add_flag("--no-placement", run.no_placement, "Keep cached chunks where they are");
  r->add_option("--budgeting", run.budgeting, "distributed or local");
  r->add_option("--snapshot", run.snapshot, "Write the final cluster state here");
  r->add_option("--restore", run.restore, "Start from a saved cluster state");

  std::vector<std::string> reports;
  std::string compare_out;
  auto* c = app.add_subcommand("compare", "Compare reports against the first one");
  c->add_option("reports", reports, "Run reports; the first is the baseline")->required();
  c->add_option("--out", compare_out, "Write the comparison as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*r) return cmd_run(run);
    if (*c) return cmd_compare(reports, compare_out);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const IngestError& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const GenerationError& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const PreconditionError& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitOther;
  }
  return kExitOther;
}

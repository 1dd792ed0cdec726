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

// Sparse array files (CSV and the SABF binary layout), the schema sidecar,
// workload traces, and the synthetic dataset/workload generators.
//
// SABF layout, all integers little-endian:
//   char[4]  magic "SABF"
//   u32      version (1)
//   u32      d (dimensions)
//   u32      m (attributes)
//   u64      cell count
//   i64[d]   bounding box lo
//   i64[d]   bounding box hi
//   records: i64[d] coordinates, then per attribute an i64 (int) or an
//            IEEE-754 f64 (float) as declared by the schema.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "arraycache/array.hpp"
#include "arraycache/chunk_index.hpp"
#include "arraycache/cluster.hpp"
#include "arraycache/errors.hpp"

namespace arraycache {

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Schema sidecar: one directive per line.
//   dim <name> <lo> <hi>
//   attr <name> int|float
//   cell_record_bytes <n>
// Blank lines and lines starting with '#' are ignored.

inline ArraySchema parse_schema(std::istream& in) {
  std::vector<DimSpec> dims;
  std::vector<AttrSpec> attrs;
  std::uint64_t record_bytes = 0;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto w = detail::words(line);
    if (w.empty() || w[0].front() == '#') continue;
    if (w[0] == "dim" && w.size() == 4) {
      DimSpec d{std::string(w[1])};
      if (!detail::parse_number(w[2], d.lo) || !detail::parse_number(w[3], d.hi)) {
        throw IngestError("bad dimension range", lineno);
      }
      dims.push_back(std::move(d));
    } else if (w[0] == "attr" && w.size() == 3) {
      if (w[2] != "int" && w[2] != "float") throw IngestError("attribute kind must be int or float", lineno);
      attrs.push_back({std::string(w[1]), w[2] == "int" ? AttrKind::kInt : AttrKind::kFloat});
    } else if (w[0] == "cell_record_bytes" && w.size() == 2) {
      if (!detail::parse_number(w[1], record_bytes) || record_bytes == 0) {
        throw IngestError("cell_record_bytes must be a positive integer", lineno);
      }
    } else {
      throw IngestError("unrecognized schema directive '" + line + "'", lineno);
    }
  }
  try {
    return ArraySchema(std::move(dims), std::move(attrs), record_bytes);
  } catch (const UsageError& e) {
    throw IngestError(std::string("invalid schema: ") + e.what());
  }
}

inline ArraySchema read_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open schema " + path.string());
  return parse_schema(in);
}

inline void write_schema(std::ostream& out, const ArraySchema& schema) {
  out << "# arraycache schema\n";
  for (const auto& d : schema.dims()) out << "dim " << d.name << ' ' << d.lo << ' ' << d.hi << '\n';
  for (const auto& a : schema.attrs()) {
    out << "attr " << a.name << ' ' << (a.kind == AttrKind::kInt ? "int" : "float") << '\n';
  }
  out << "cell_record_bytes " << schema.cell_record_bytes() << '\n';
}

// ---------------------------------------------------------------------------
// Cell deduplication: one tuple per coordinate, the last record wins, first
// occurrence order is kept.

inline CellSet dedupe_cells(const CellSet& in) {
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  std::vector<std::size_t> order;  // first occurrence rows
  std::vector<std::size_t> latest;  // parallel to order
  for (std::size_t r = 0; r < in.size(); ++r) {
    const auto c = in.coords(r);
    auto& bucket = buckets[detail::hash_point(c)];
    bool found = false;
    for (std::size_t slot : bucket) {
      const auto o = in.coords(order[slot]);
      if (std::equal(o.begin(), o.end(), c.begin())) {
        latest[slot] = r;
        found = true;
        break;
      }
    }
    if (!found) {
      bucket.push_back(order.size());
      order.push_back(r);
      latest.push_back(r);
    }
  }
  if (order.size() == in.size()) return in;
  CellSet out(in.rank(), in.attr_count());
  out.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) out.add(in.coords(order[i]), in.attrs(latest[i]));
  return out;
}

// ---------------------------------------------------------------------------
// CSV: d coordinates then m attribute values per line, comma separated.

inline CellSet parse_csv(std::istream& in, const ArraySchema& schema) {
  const std::size_t d = schema.rank(), m = schema.attr_count();
  CellSet cells(d, m);
  std::string line;
  std::uint64_t lineno = 0;
  std::vector<Coord> coords(d);
  std::vector<AttrValue> attrs(m);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw IngestError("empty record", lineno);
    }
    const auto fields = detail::split(line, ',');
    if (fields.size() != d + m) {
      throw IngestError("expected " + std::to_string(d + m) + " fields, found " +
                            std::to_string(fields.size()),
                        lineno);
    }
    for (std::size_t k = 0; k < d; ++k) {
      if (!detail::parse_number(fields[k], coords[k])) {
        throw IngestError("bad coordinate '" + std::string(fields[k]) + "'", lineno);
      }
    }
    if (!schema.contains(coords)) throw IngestError("coordinate outside the schema range", lineno);
    for (std::size_t a = 0; a < m; ++a) {
      const auto f = fields[d + a];
      if (schema.attrs()[a].kind == AttrKind::kInt) {
        std::int64_t v;
        if (!detail::parse_number(f, v)) throw IngestError("bad int attribute '" + std::string(f) + "'", lineno);
        attrs[a] = v;
      } else {
        double v;
        if (!detail::parse_number(f, v)) throw IngestError("bad float attribute '" + std::string(f) + "'", lineno);
        attrs[a] = v;
      }
    }
    cells.add(coords, attrs);
  }
  return dedupe_cells(cells);
}

inline void write_csv(std::ostream& out, const CellSet& cells) {
  for (std::size_t r = 0; r < cells.size(); ++r) {
    bool first = true;
    for (Coord c : cells.coords(r)) {
      if (!first) out << ',';
      out << c;
      first = false;
    }
    for (const auto& a : cells.attrs(r)) {
      if (!first) out << ',';
      first = false;
      if (const auto* i = std::get_if<std::int64_t>(&a)) {
        out << *i;
      } else {
        out << detail::format_double(std::get<double>(a));
      }
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// SABF binary.

inline constexpr std::array<char, 4> kSabfMagic = {'S', 'A', 'B', 'F'};
inline constexpr std::uint32_t kSabfVersion = 1;

inline std::uint64_t sabf_header_bytes(std::size_t rank) { return 4 + 4 + 4 + 4 + 8 + 16 * rank; }

inline std::uint64_t sabf_file_bytes(std::size_t rank, std::size_t attr_count, std::uint64_t cells) {
  return sabf_header_bytes(rank) + cells * 8 * (rank + attr_count);
}

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline std::string encode_sabf(const CellSet& cells, const ArraySchema& schema) {
  if (cells.empty()) throw UsageError("cannot encode an empty cell set");
  if (cells.rank() != schema.rank() || cells.attr_count() != schema.attr_count()) {
    throw UsageError("cell set does not match the schema");
  }
  const auto box = tight_box(cells);
  std::string out;
  out.reserve(sabf_file_bytes(cells.rank(), cells.attr_count(), cells.size()));
  out.append(kSabfMagic.data(), kSabfMagic.size());
  detail::put_u32(out, kSabfVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(schema.rank()));
  detail::put_u32(out, static_cast<std::uint32_t>(schema.attr_count()));
  detail::put_u64(out, cells.size());
  for (Coord c : box.lo()) detail::put_u64(out, static_cast<std::uint64_t>(c));
  for (Coord c : box.hi()) detail::put_u64(out, static_cast<std::uint64_t>(c));
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (Coord c : cells.coords(r)) detail::put_u64(out, static_cast<std::uint64_t>(c));
    const auto attrs = cells.attrs(r);
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      if (schema.attrs()[a].kind == AttrKind::kInt) {
        const auto* i = std::get_if<std::int64_t>(&attrs[a]);
        detail::put_u64(out, static_cast<std::uint64_t>(i ? *i : static_cast<std::int64_t>(std::get<double>(attrs[a]))));
      } else {
        const auto* f = std::get_if<double>(&attrs[a]);
        detail::put_u64(out, std::bit_cast<std::uint64_t>(f ? *f : static_cast<double>(std::get<std::int64_t>(attrs[a]))));
      }
    }
  }
  return out;
}

inline CellSet decode_sabf(std::string_view bytes, const ArraySchema& schema) {
  const std::size_t d = schema.rank(), m = schema.attr_count();
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < sabf_header_bytes(d) ||
      !std::equal(kSabfMagic.begin(), kSabfMagic.end(), bytes.begin())) {
    throw IngestError("not an SABF file");
  }
  if (detail::get_le(p + 4, 4) != kSabfVersion) throw IngestError("unsupported SABF version");
  if (detail::get_le(p + 8, 4) != d || detail::get_le(p + 12, 4) != m) {
    throw IngestError("SABF dimensions/attributes do not match the schema");
  }
  const std::uint64_t count = detail::get_le(p + 16, 8);
  if (count == 0) throw IngestError("SABF file holds no cells");
  const std::uint64_t record = 8 * (d + m);
  if (bytes.size() != sabf_header_bytes(d) + count * record) {
    throw IngestError("SABF size disagrees with the header cell count");
  }
  std::vector<Coord> lo(d), hi(d);
  for (std::size_t k = 0; k < d; ++k) {
    lo[k] = static_cast<Coord>(detail::get_le(p + 24 + 8 * k, 8));
    hi[k] = static_cast<Coord>(detail::get_le(p + 24 + 8 * (d + k), 8));
  }
  CellSet cells(d, m);
  cells.reserve(count);
  std::vector<Coord> coords(d);
  std::vector<AttrValue> attrs(m);
  const unsigned char* rec = p + sabf_header_bytes(d);
  for (std::uint64_t r = 0; r < count; ++r, rec += record) {
    for (std::size_t k = 0; k < d; ++k) coords[k] = static_cast<Coord>(detail::get_le(rec + 8 * k, 8));
    if (!schema.contains(coords)) throw IngestError("coordinate outside the schema range", r + 1);
    for (std::size_t a = 0; a < m; ++a) {
      const auto raw = detail::get_le(rec + 8 * (d + a), 8);
      if (schema.attrs()[a].kind == AttrKind::kInt) {
        attrs[a] = static_cast<std::int64_t>(raw);
      } else {
        attrs[a] = std::bit_cast<double>(raw);
      }
    }
    cells.add(coords, attrs);
  }
  if (tight_box(cells) != BoundingBox(lo, hi)) {
    throw IngestError("SABF header box is not the tight box of its records");
  }
  return dedupe_cells(cells);
}

// ---------------------------------------------------------------------------
// Raw file scan.

struct ScannedFile {
  CellSet cells;
  RawFileMeta meta;
};

inline RawFileMeta make_file_meta(const FileId& id, const CellSet& cells, const ArraySchema& schema,
                                  std::uint64_t on_disk_bytes) {
  if (cells.empty()) throw IngestError("raw file " + to_string(id) + " holds no cells");
  RawFileMeta meta;
  meta.file_id = id;
  meta.cell_count = cells.size();
  meta.file_bytes = std::max(on_disk_bytes, cells.size() * schema.cell_record_bytes());
  meta.box = tight_box(cells);
  return meta;
}

// Reads a whole raw file, CSV or SABF (detected by the magic bytes).
inline ScannedFile scan_file(const std::filesystem::path& path, const ArraySchema& schema,
                             const FileId& id = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open raw file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ScannedFile out;
  if (bytes.size() >= 4 && std::equal(kSabfMagic.begin(), kSabfMagic.end(), bytes.begin())) {
    out.cells = decode_sabf(bytes, schema);
  } else {
    std::istringstream text(bytes);
    out.cells = parse_csv(text, schema);
  }
  out.meta = make_file_meta(id, out.cells, schema, bytes.size());
  return out;
}

// ---------------------------------------------------------------------------
// Workloads.

enum class WorkloadPattern { kShifting, kAlternating, kShiftingReturn, kUniformRandom };

inline WorkloadPattern parse_pattern(std::string_view s) {
  if (s == "shifting") return WorkloadPattern::kShifting;
  if (s == "alternating") return WorkloadPattern::kAlternating;
  if (s == "shifting-return") return WorkloadPattern::kShiftingReturn;
  if (s == "uniform-random") return WorkloadPattern::kUniformRandom;
  throw UsageError("unknown workload pattern '" + std::string(s) + "'");
}

inline std::string pattern_name(WorkloadPattern p) {
  switch (p) {
    case WorkloadPattern::kShifting: return "shifting";
    case WorkloadPattern::kAlternating: return "alternating";
    case WorkloadPattern::kShiftingReturn: return "shifting-return";
    case WorkloadPattern::kUniformRandom: return "uniform-random";
  }
  return "?";
}

struct WorkloadTrace {
  std::string pattern;
  std::uint64_t seed = 0;
  std::vector<QuerySpec> queries;

  friend bool operator==(const WorkloadTrace&, const WorkloadTrace&) = default;
};

struct WorkloadParams {
  BoundingBox base;          // range of the first query
  std::vector<Coord> shift;  // translation between consecutive positions
  std::size_t count = 10;
  std::uint64_t radius = 1;
};

namespace detail {

// Portable draws on top of mt19937_64 so outputs match across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  // Uniform double in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (spare_) {
      spare_ = false;
      return saved_;
    }
    double u1;
    do {
      u1 = unit();
    } while (u1 == 0.0);
    const double u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    saved_ = r * std::sin(2.0 * std::numbers::pi * u2);
    spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  bool spare_ = false;
  double saved_ = 0.0;
};

inline BoundingBox translate_clamped(const BoundingBox& b, const std::vector<Coord>& offset,
                                     const ArraySchema& schema) {
  std::vector<Coord> lo(b.rank()), hi(b.rank());
  for (std::size_t k = 0; k < b.rank(); ++k) {
    const auto& d = schema.dims()[k];
    lo[k] = std::max(d.lo, b.lo(k) + offset[k]);
    hi[k] = std::min(d.hi, b.hi(k) + offset[k]);
    if (lo[k] > hi[k]) throw GenerationError("shifted query range falls outside the schema");
  }
  return {std::move(lo), std::move(hi)};
}

}  // namespace detail

inline WorkloadTrace generate_workload(WorkloadPattern pattern, const WorkloadParams& params,
                                       const ArraySchema& schema, std::uint64_t seed) {
  const std::size_t d = schema.rank();
  if (params.base.rank() != d) throw UsageError("base range rank does not match the schema");
  if (params.shift.size() != d) throw UsageError("shift vector rank does not match the schema");
  if (params.count == 0) throw UsageError("a workload needs at least one query");
  if (!schema.domain().contains(params.base)) throw GenerationError("base range lies outside the schema");

  WorkloadTrace trace{pattern_name(pattern), seed, {}};
  detail::Rng rng(seed);
  std::vector<std::size_t> positions;
  switch (pattern) {
    case WorkloadPattern::kShifting:
      for (std::size_t k = 0; k < params.count; ++k) positions.push_back(k);
      break;
    case WorkloadPattern::kAlternating:
      for (std::size_t k = 0; k < params.count; ++k) positions.push_back(k % 4);
      break;
    case WorkloadPattern::kShiftingReturn: {
      const std::size_t half = (params.count + 1) / 2;
      for (std::size_t k = 0; k < half; ++k) positions.push_back(k);
      for (std::size_t k = half; k-- > 0 && positions.size() < params.count;) positions.push_back(k);
      break;
    }
    case WorkloadPattern::kUniformRandom:
      break;
  }

  for (std::size_t i = 0; i < params.count; ++i) {
    QuerySpec q;
    q.id = i + 1;
    q.shape_radius = params.radius;
    if (pattern == WorkloadPattern::kUniformRandom) {
      std::vector<Coord> lo(d), hi(d);
      for (std::size_t k = 0; k < d; ++k) {
        const auto& dim = schema.dims()[k];
        const Coord extent = params.base.hi(k) - params.base.lo(k);
        lo[k] = rng.uniform(dim.lo, std::max(dim.lo, dim.hi - extent));
        hi[k] = std::min(dim.hi, lo[k] + extent);
      }
      q.range = BoundingBox(std::move(lo), std::move(hi));
    } else {
      std::vector<Coord> offset(d);
      for (std::size_t k = 0; k < d; ++k) offset[k] = params.shift[k] * static_cast<Coord>(positions[i]);
      q.range = detail::translate_clamped(params.base, offset, schema);
    }
    trace.queries.push_back(std::move(q));
  }
  return trace;
}

// Text form:
//   # arraycache workload v1
//   pattern <name>
//   seed <n>
//   query <id> <lo,..> <hi,..> <radius>
inline void write_workload(std::ostream& out, const WorkloadTrace& w) {
  out << "# arraycache workload v1\n";
  out << "pattern " << (w.pattern.empty() ? "custom" : w.pattern) << '\n';
  out << "seed " << w.seed << '\n';
  for (const auto& q : w.queries) {
    out << "query " << q.id << ' ';
    for (std::size_t k = 0; k < q.range.rank(); ++k) out << (k ? "," : "") << q.range.lo(k);
    out << ' ';
    for (std::size_t k = 0; k < q.range.rank(); ++k) out << (k ? "," : "") << q.range.hi(k);
    out << ' ' << q.shape_radius << '\n';
  }
}

inline WorkloadTrace parse_workload(std::istream& in, const ArraySchema& schema) {
  WorkloadTrace w;
  std::string line;
  std::uint64_t lineno = 0;
  bool versioned = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "# arraycache workload v1") {
      versioned = true;
      continue;
    }
    const auto t = detail::words(line);
    if (t.empty() || t[0].front() == '#') continue;
    if (t[0] == "pattern" && t.size() == 2) {
      w.pattern = std::string(t[1]);
    } else if (t[0] == "seed" && t.size() == 2) {
      if (!detail::parse_number(t[1], w.seed)) throw IngestError("bad seed", lineno);
    } else if (t[0] == "query" && t.size() == 5) {
      QuerySpec q;
      if (!detail::parse_number(t[1], q.id)) throw IngestError("bad query id", lineno);
      if (q.id != w.queries.size() + 1) throw IngestError("query ids must run 1..n in order", lineno);
      const auto lo_f = detail::split(t[2], ',');
      const auto hi_f = detail::split(t[3], ',');
      if (lo_f.size() != schema.rank() || hi_f.size() != schema.rank()) {
        throw IngestError("query range rank does not match the schema", lineno);
      }
      std::vector<Coord> lo(schema.rank()), hi(schema.rank());
      for (std::size_t k = 0; k < schema.rank(); ++k) {
        if (!detail::parse_number(lo_f[k], lo[k]) || !detail::parse_number(hi_f[k], hi[k])) {
          throw IngestError("bad query coordinate", lineno);
        }
      }
      if (!detail::parse_number(t[4], q.shape_radius)) throw IngestError("bad radius", lineno);
      try {
        q.range = BoundingBox(std::move(lo), std::move(hi));
      } catch (const UsageError& e) {
        throw IngestError(e.what(), lineno);
      }
      if (!schema.domain().contains(q.range)) throw IngestError("query range outside the schema", lineno);
      w.queries.push_back(std::move(q));
    } else {
      throw IngestError("unrecognized workload line '" + line + "'", lineno);
    }
  }
  if (!versioned) throw IngestError("missing workload version header");
  return w;
}

inline WorkloadTrace read_workload(const std::filesystem::path& path, const ArraySchema& schema) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open workload " + path.string());
  return parse_workload(in, schema);
}

// ---------------------------------------------------------------------------
// Synthetic datasets.

enum class Skew { kUniform, kGaussianCluster };

inline Skew parse_skew(std::string_view s) {
  if (s == "uniform") return Skew::kUniform;
  if (s == "gaussian-cluster") return Skew::kGaussianCluster;
  throw UsageError("unknown skew '" + std::string(s) + "'");
}

// How generated points are ordered before being cut into files.
enum class Arrival {
  kInterleaved,  // every point picks a random cluster: files overlap spatially
  kClustered,    // cluster by cluster: files are spatially compact
};

inline Arrival parse_arrival(std::string_view s) {
  if (s == "interleaved") return Arrival::kInterleaved;
  if (s == "clustered") return Arrival::kClustered;
  throw UsageError("unknown arrival order '" + std::string(s) + "'");
}

struct SyntheticParams {
  std::uint64_t n_points = 1000;
  std::uint32_t n_files = 10;
  Skew skew = Skew::kUniform;
  double sigma = 10.0;          // cells, per dimension
  std::uint32_t clusters = 0;   // 0: one cluster per 10,000 points
  Arrival arrival = Arrival::kInterleaved;
  std::uint64_t seed = 1;
};

// Cells of each generated file, in file order. Points are deduplicated by
// coordinate; uniform draws are redrawn on collision so exactly n_points
// cells come out, gaussian draws are simply dropped.
inline std::vector<CellSet> generate_synthetic_dataset(const ArraySchema& schema,
                                                       const SyntheticParams& p) {
  if (p.n_files == 0) throw UsageError("at least one file is required");
  if (p.n_points < p.n_files) throw UsageError("n_points must be >= n_files");
  if (p.sigma < 0) throw UsageError("sigma must be non-negative");
  const std::size_t d = schema.rank();
  const auto domain_cells = volume(schema.domain());
  if (p.skew == Skew::kUniform && domain_cells < p.n_points) {
    throw GenerationError("domain holds fewer cells than requested points");
  }

  detail::Rng rng(p.seed);
  // Mixed-radix packing of coordinates for deduplication when it fits.
  const bool packable = domain_cells != std::numeric_limits<std::uint64_t>::max();
  auto pack = [&](const std::vector<Coord>& c) {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const auto& dim = schema.dims()[k];
      key = key * static_cast<std::uint64_t>(dim.hi - dim.lo + 1) + static_cast<std::uint64_t>(c[k] - dim.lo);
    }
    return key;
  };
  if (!packable) throw GenerationError("schema domain too large for the synthetic generator");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(p.n_points * 2);

  CellSet all(d, schema.attr_count());
  all.reserve(p.n_points);
  std::vector<Coord> c(d);
  std::vector<AttrValue> attrs(schema.attr_count());
  auto draw_attrs = [&] {
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      if (schema.attrs()[a].kind == AttrKind::kInt) {
        attrs[a] = rng.uniform(0, 1'000'000);
      } else {
        attrs[a] = rng.unit();
      }
    }
  };

  if (p.skew == Skew::kUniform) {
    while (all.size() < p.n_points) {
      for (std::size_t k = 0; k < d; ++k) c[k] = rng.uniform(schema.dims()[k].lo, schema.dims()[k].hi);
      if (!seen.insert(pack(c)).second) continue;
      draw_attrs();
      all.add(c, attrs);
    }
  } else {
    const std::uint32_t clusters =
        p.clusters != 0 ? p.clusters
                        : static_cast<std::uint32_t>(std::max<std::uint64_t>(1, (p.n_points + 9'999) / 10'000));
    std::vector<std::vector<Coord>> centers(clusters, std::vector<Coord>(d));
    for (auto& center : centers) {
      for (std::size_t k = 0; k < d; ++k) center[k] = rng.uniform(schema.dims()[k].lo, schema.dims()[k].hi);
    }
    const std::uint64_t per_cluster = (p.n_points + clusters - 1) / clusters;
    for (std::uint64_t i = 0; i < p.n_points; ++i) {
      const std::size_t which = p.arrival == Arrival::kInterleaved
                                    ? static_cast<std::size_t>(rng.uniform(0, clusters - 1))
                                    : static_cast<std::size_t>(std::min<std::uint64_t>(i / per_cluster, clusters - 1));
      for (std::size_t k = 0; k < d; ++k) {
        const auto& dim = schema.dims()[k];
        const double offset = p.sigma == 0.0 ? 0.0 : std::round(p.sigma * rng.normal());
        c[k] = std::clamp<Coord>(centers[which][k] + static_cast<Coord>(offset), dim.lo, dim.hi);
      }
      draw_attrs();
      if (!seen.insert(pack(c)).second) continue;
      all.add(c, attrs);
    }
  }

  if (all.size() < p.n_files) throw GenerationError("too few distinct points for the requested files");
  std::vector<CellSet> files;
  const std::size_t n = all.size();
  for (std::uint32_t f = 0; f < p.n_files; ++f) {
    const std::size_t begin = n * f / p.n_files;
    const std::size_t end = n * (f + 1) / p.n_files;
    CellSet part(d, schema.attr_count());
    part.reserve(end - begin);
    for (std::size_t r = begin; r < end; ++r) part.add(all.coords(r), all.attrs(r));
    files.push_back(std::move(part));
  }
  return files;
}

// File i lives on node i mod nodes as that node's (i / nodes)-th file. The
// scan cost of an in-memory file is its SABF encoding size.
inline std::vector<RawFile> distribute_files(std::vector<CellSet> parts, const ArraySchema& schema,
                                             std::uint32_t nodes,
                                             const std::vector<std::uint64_t>& on_disk_bytes = {}) {
  if (nodes == 0) throw UsageError("cluster needs at least one node");
  std::vector<RawFile> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const FileId id{NodeId{static_cast<std::uint32_t>(i % nodes)}, static_cast<std::uint32_t>(i / nodes)};
    const auto bytes = i < on_disk_bytes.size()
                           ? on_disk_bytes[i]
                           : sabf_file_bytes(schema.rank(), schema.attr_count(), parts[i].size());
    RawFile f{make_file_meta(id, parts[i], schema, bytes), std::move(parts[i])};
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace arraycache

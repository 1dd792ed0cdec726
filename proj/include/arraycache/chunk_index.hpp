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

// Query-driven evolving chunking of raw files. Each file starts as a single
// root chunk covering all of its cells; every query that overlaps a chunk
// may split it in two along one of the query's boundaries. Chunks of a file
// stay pairwise disjoint and always cover every cell of the file.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "arraycache/array.hpp"
#include "arraycache/errors.hpp"
#include "arraycache/ids.hpp"

namespace arraycache {

inline constexpr std::uint64_t kDefaultMinCells = 1000;

struct RawFileMeta {
  FileId file_id;
  std::uint64_t cell_count = 0;
  std::uint64_t file_bytes = 0;  // cost of one full scan
  BoundingBox box;
};

// Coordinator-side view of a chunk. The cells themselves live at the nodes.
struct ChunkSummary {
  ChunkId id{};
  FileId file;
  BoundingBox box;
  std::uint64_t cell_count = 0;
  std::uint64_t size_bytes = 0;
  std::optional<ChunkId> parent;

  friend bool operator==(const ChunkSummary&, const ChunkSummary&) = default;
};

class ChunkIdAllocator {
 public:
  explicit ChunkIdAllocator(std::uint64_t first = 0) : next_(first) {}
  ChunkId next() { return ChunkId{next_++}; }
  std::uint64_t peek() const { return next_; }

 private:
  std::uint64_t next_;
};

// Result of splitting one chunk: rows whose coordinate on `dim` is below
// `boundary` go to the lower side.
struct SplitOutcome {
  std::size_t dim = 0;
  Coord boundary = 0;
  BoundingBox lower_box;
  BoundingBox upper_box;
  std::vector<std::uint32_t> lower_rows;
  std::vector<std::uint32_t> upper_rows;
};

namespace detail {

struct SideBounds {
  std::vector<Coord> lo, hi;
  std::uint64_t count = 0;

  explicit SideBounds(std::size_t rank)
      : lo(rank, std::numeric_limits<Coord>::max()), hi(rank, std::numeric_limits<Coord>::min()) {}

  void add(std::span<const Coord> c) {
    for (std::size_t k = 0; k < lo.size(); ++k) {
      lo[k] = std::min(lo[k], c[k]);
      hi[k] = std::max(hi[k], c[k]);
    }
    ++count;
  }

  std::uint64_t volume() const {
    return arraycache::volume(BoundingBox(lo, hi));
  }
};

}  // namespace detail

// Chunk split. Returns nullopt when the chunk stays whole: it is below
// min_cells and still owns a queried cell, no query boundary cuts strictly
// through its box, or every cut leaves one side without cells. Otherwise the
// cut minimizing the summed volume of the two tight boxes wins; ties go to
// the lowest dimension, then the lower boundary coordinate.
inline std::optional<SplitOutcome> split_chunk(const CellSet& cells,
                                               std::span<const std::uint32_t> rows,
                                               const BoundingBox& box, const QuerySpec& q,
                                               std::uint64_t min_cells) {
  if (rows.empty()) throw PreconditionError("split_chunk: chunk cells are not loaded");
  if (!intersects(box, q.range)) throw PreconditionError("split_chunk: chunk does not overlap the query");

  if (rows.size() < min_cells) {
    const bool has_queried_cell = std::any_of(rows.begin(), rows.end(), [&](std::uint32_t r) {
      return q.range.contains(cells.coords(r));
    });
    if (has_queried_cell) return std::nullopt;
  }

  const std::size_t rank = box.rank();
  std::optional<std::pair<std::size_t, Coord>> best;
  std::uint64_t best_volume = std::numeric_limits<std::uint64_t>::max();

  for (std::size_t k = 0; k < rank; ++k) {
    const Coord boundaries[2] = {q.range.lo(k), q.range.hi(k) + 1};
    for (Coord s : boundaries) {
      if (!(box.lo(k) < s && s <= box.hi(k))) continue;
      detail::SideBounds lower(rank), upper(rank);
      for (auto r : rows) {
        const auto c = cells.coords(r);
        (c[k] < s ? lower : upper).add(c);
      }
      if (lower.count == 0 || upper.count == 0) continue;
      const auto v = saturating_add(lower.volume(), upper.volume());
      if (!best || v < best_volume) {
        best_volume = v;
        best = {k, s};
      }
    }
  }
  if (!best) return std::nullopt;

  SplitOutcome out;
  out.dim = best->first;
  out.boundary = best->second;
  for (auto r : rows) {
    (cells.coords(r)[out.dim] < out.boundary ? out.lower_rows : out.upper_rows).push_back(r);
  }
  out.lower_box = tight_box(cells, out.lower_rows);
  out.upper_box = tight_box(cells, out.upper_rows);
  return out;
}

struct RefinedChunk {
  ChunkSummary summary;
  std::vector<std::uint32_t> rows;
  bool overlaps_query = false;
};

struct SplitRecord {
  std::uint64_t query_id = 0;
  ChunkId parent{};
  ChunkId lower{};
  ChunkId upper{};
};

struct RefineResult {
  std::vector<RefinedChunk> chunks;  // one or two per overlapping input chunk
  std::vector<SplitRecord> splits;
};

class FileChunking {
 public:
  FileChunking() = default;

  FileChunking(const RawFileMeta& meta, std::uint64_t cell_record_bytes, std::uint64_t min_cells,
               ChunkId root_id)
      : file_(meta.file_id), cell_record_bytes_(cell_record_bytes), min_cells_(min_cells) {
    if (min_cells_ == 0) throw UsageError("min_cells must be positive");
    if (meta.cell_count == 0) throw UsageError("a raw file must own at least one cell");
    chunks_.emplace(root_id, ChunkSummary{root_id, meta.file_id, meta.box, meta.cell_count,
                                          meta.cell_count * cell_record_bytes, std::nullopt});
  }

  // Rebuilds a chunking from previously captured summaries.
  FileChunking(FileId file, std::uint64_t cell_record_bytes, std::uint64_t min_cells,
               std::vector<ChunkSummary> chunks, std::vector<SplitRecord> history = {})
      : file_(file),
        cell_record_bytes_(cell_record_bytes),
        min_cells_(min_cells),
        history_(std::move(history)) {
    if (min_cells_ == 0) throw UsageError("min_cells must be positive");
    for (auto& c : chunks) {
      if (c.file != file_) throw UsageError("chunk " + to_string(c.id) + " belongs to another file");
      const auto id = c.id;
      chunks_.emplace(id, std::move(c));
    }
  }

  const FileId& file() const { return file_; }
  std::uint64_t min_cells() const { return min_cells_; }
  std::uint64_t cell_record_bytes() const { return cell_record_bytes_; }
  const std::map<ChunkId, ChunkSummary>& chunks() const { return chunks_; }
  const std::vector<SplitRecord>& split_history() const { return history_; }

  const ChunkSummary& chunk(ChunkId id) const {
    auto it = chunks_.find(id);
    if (it == chunks_.end()) throw UsageError("unknown chunk " + to_string(id));
    return it->second;
  }

  bool has_chunk(ChunkId id) const { return chunks_.contains(id); }

  // Chunks whose box intersects `range`, in chunk-id order.
  std::vector<ChunkId> overlapping(const BoundingBox& range) const {
    std::vector<ChunkId> out;
    for (const auto& [id, c] : chunks_) {
      if (intersects(c.box, range)) out.push_back(id);
    }
    return out;
  }

  // Passes every chunk overlapping q through split_chunk and installs the
  // replacements. `rows_by_chunk` must hold the cell rows of every
  // overlapping chunk.
  RefineResult refine(const QuerySpec& q, const CellSet& cells,
                      const std::map<ChunkId, std::vector<std::uint32_t>>& rows_by_chunk,
                      ChunkIdAllocator& ids) {
    RefineResult result;
    for (ChunkId id : overlapping(q.range)) {
      auto rows_it = rows_by_chunk.find(id);
      if (rows_it == rows_by_chunk.end() || rows_it->second.empty()) {
        throw PreconditionError("refine: missing cell data for " + to_string(id));
      }
      const ChunkSummary parent = chunks_.at(id);
      auto outcome = split_chunk(cells, rows_it->second, parent.box, q, min_cells_);
      if (!outcome) {
        result.chunks.push_back({parent, rows_it->second, true});
        continue;
      }
      const ChunkId lower_id = ids.next();
      const ChunkId upper_id = ids.next();
      ChunkSummary lower{lower_id, file_, outcome->lower_box, outcome->lower_rows.size(),
                         outcome->lower_rows.size() * cell_record_bytes_, id};
      ChunkSummary upper{upper_id, file_, outcome->upper_box, outcome->upper_rows.size(),
                         outcome->upper_rows.size() * cell_record_bytes_, id};
      chunks_.erase(id);
      chunks_.emplace(lower_id, lower);
      chunks_.emplace(upper_id, upper);
      const SplitRecord rec{q.id, id, lower_id, upper_id};
      history_.push_back(rec);
      result.splits.push_back(rec);
      const bool lower_hit = intersects(lower.box, q.range);
      const bool upper_hit = intersects(upper.box, q.range);
      result.chunks.push_back({std::move(lower), std::move(outcome->lower_rows), lower_hit});
      result.chunks.push_back({std::move(upper), std::move(outcome->upper_rows), upper_hit});
    }
    return result;
  }

 private:
  FileId file_;
  std::uint64_t cell_record_bytes_ = 0;
  std::uint64_t min_cells_ = kDefaultMinCells;
  std::map<ChunkId, ChunkSummary> chunks_;
  std::vector<SplitRecord> history_;
};

inline std::vector<ChunkId> overlapping_chunks(const FileChunking& fc, const QuerySpec& q) {
  return fc.overlapping(q.range);
}

}  // namespace arraycache

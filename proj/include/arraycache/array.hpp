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

// Array model shared by every other module: schema, cells, and integer
// bounding-box geometry.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "arraycache/errors.hpp"

namespace arraycache {

using Coord = std::int64_t;

enum class AttrKind { kInt, kFloat };

// Attributes are carried opaquely; caching logic never looks inside.
using AttrValue = std::variant<std::int64_t, double>;

struct DimSpec {
  std::string name;
  Coord lo = 0;
  Coord hi = 0;

  friend bool operator==(const DimSpec&, const DimSpec&) = default;
};

struct AttrSpec {
  std::string name;
  AttrKind kind = AttrKind::kInt;

  friend bool operator==(const AttrSpec&, const AttrSpec&) = default;
};

class BoundingBox {
 public:
  BoundingBox() = default;

  BoundingBox(std::vector<Coord> lo, std::vector<Coord> hi)
      : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.empty() || lo_.size() != hi_.size()) {
      throw UsageError("bounding box needs matching non-empty lo/hi tuples");
    }
    for (std::size_t k = 0; k < lo_.size(); ++k) {
      if (lo_[k] > hi_[k]) {
        throw UsageError("bounding box has lo > hi on dimension " + std::to_string(k));
      }
    }
  }

  std::size_t rank() const { return lo_.size(); }
  Coord lo(std::size_t k) const { return lo_[k]; }
  Coord hi(std::size_t k) const { return hi_[k]; }
  const std::vector<Coord>& lo() const { return lo_; }
  const std::vector<Coord>& hi() const { return hi_; }

  bool contains(std::span<const Coord> point) const {
    for (std::size_t k = 0; k < lo_.size(); ++k) {
      if (point[k] < lo_[k] || point[k] > hi_[k]) return false;
    }
    return true;
  }

  bool contains(const BoundingBox& other) const {
    for (std::size_t k = 0; k < lo_.size(); ++k) {
      if (other.lo_[k] < lo_[k] || other.hi_[k] > hi_[k]) return false;
    }
    return true;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  std::vector<Coord> lo_;
  std::vector<Coord> hi_;
};

inline std::ostream& operator<<(std::ostream& os, const BoundingBox& b) {
  for (std::size_t k = 0; k < b.rank(); ++k) {
    if (k != 0) os << "x";
    os << "[" << b.lo(k) << ".." << b.hi(k) << "]";
  }
  return os;
}

class ArraySchema {
 public:
  ArraySchema() = default;

  // cell_record_bytes == 0 selects the binary record width 8 * (d + m).
  ArraySchema(std::vector<DimSpec> dims, std::vector<AttrSpec> attrs,
              std::uint64_t cell_record_bytes = 0)
      : dims_(std::move(dims)), attrs_(std::move(attrs)) {
    if (dims_.empty()) throw UsageError("schema needs at least one dimension");
    std::set<std::string> names;
    for (const auto& d : dims_) {
      if (d.lo > d.hi) throw UsageError("dimension " + d.name + " has lo > hi");
      if (!names.insert(d.name).second) throw UsageError("duplicate dimension name " + d.name);
    }
    names.clear();
    for (const auto& a : attrs_) {
      if (!names.insert(a.name).second) throw UsageError("duplicate attribute name " + a.name);
    }
    cell_record_bytes_ = cell_record_bytes == 0 ? 8 * (dims_.size() + attrs_.size())
                                                : cell_record_bytes;
  }

  std::size_t rank() const { return dims_.size(); }
  std::size_t attr_count() const { return attrs_.size(); }
  const std::vector<DimSpec>& dims() const { return dims_; }
  const std::vector<AttrSpec>& attrs() const { return attrs_; }
  std::uint64_t cell_record_bytes() const { return cell_record_bytes_; }

  BoundingBox domain() const {
    std::vector<Coord> lo, hi;
    for (const auto& d : dims_) {
      lo.push_back(d.lo);
      hi.push_back(d.hi);
    }
    return {std::move(lo), std::move(hi)};
  }

  bool contains(std::span<const Coord> coords) const {
    if (coords.size() != dims_.size()) return false;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      if (coords[k] < dims_[k].lo || coords[k] > dims_[k].hi) return false;
    }
    return true;
  }

  friend bool operator==(const ArraySchema&, const ArraySchema&) = default;

 private:
  std::vector<DimSpec> dims_;
  std::vector<AttrSpec> attrs_;
  std::uint64_t cell_record_bytes_ = 0;
};

struct Cell {
  std::vector<Coord> coords;
  std::vector<AttrValue> attrs;

  friend bool operator==(const Cell&, const Cell&) = default;
};

// Row-major cell storage: coordinates and attributes of row i live at
// [i*d, (i+1)*d) and [i*m, (i+1)*m).
class CellSet {
 public:
  CellSet() = default;
  CellSet(std::size_t rank, std::size_t attr_count) : rank_(rank), attr_count_(attr_count) {}

  std::size_t rank() const { return rank_; }
  std::size_t attr_count() const { return attr_count_; }
  std::size_t size() const { return rank_ == 0 ? 0 : coords_.size() / rank_; }
  bool empty() const { return size() == 0; }

  void reserve(std::size_t n) {
    coords_.reserve(n * rank_);
    attrs_.reserve(n * attr_count_);
  }

  void add(std::span<const Coord> coords, std::span<const AttrValue> attrs = {}) {
    if (coords.size() != rank_) throw UsageError("cell rank mismatch");
    if (!attrs.empty() && attrs.size() != attr_count_) throw UsageError("cell attribute count mismatch");
    coords_.insert(coords_.end(), coords.begin(), coords.end());
    if (attrs.empty()) {
      attrs_.insert(attrs_.end(), attr_count_, AttrValue{std::int64_t{0}});
    } else {
      attrs_.insert(attrs_.end(), attrs.begin(), attrs.end());
    }
  }

  void add(const Cell& c) { add(c.coords, c.attrs); }

  std::span<const Coord> coords(std::size_t row) const {
    return {coords_.data() + row * rank_, rank_};
  }
  std::span<const AttrValue> attrs(std::size_t row) const {
    return {attrs_.data() + row * attr_count_, attr_count_};
  }

  Cell cell(std::size_t row) const {
    auto c = coords(row);
    auto a = attrs(row);
    return {{c.begin(), c.end()}, {a.begin(), a.end()}};
  }

  friend bool operator==(const CellSet&, const CellSet&) = default;

 private:
  std::size_t rank_ = 0;
  std::size_t attr_count_ = 0;
  std::vector<Coord> coords_;
  std::vector<AttrValue> attrs_;
};

struct QuerySpec {
  std::uint64_t id = 0;
  BoundingBox range;
  std::uint64_t shape_radius = 0;

  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

inline void require_same_rank(const BoundingBox& a, const BoundingBox& b) {
  if (a.rank() != b.rank()) {
    throw UsageError("dimensionality mismatch: " + std::to_string(a.rank()) + " vs " +
                     std::to_string(b.rank()));
  }
}

inline bool intersects(const BoundingBox& a, const BoundingBox& b) {
  require_same_rank(a, b);
  for (std::size_t k = 0; k < a.rank(); ++k) {
    if (std::max(a.lo(k), b.lo(k)) > std::min(a.hi(k), b.hi(k))) return false;
  }
  return true;
}

inline std::optional<BoundingBox> box_intersect(const BoundingBox& a, const BoundingBox& b) {
  if (!intersects(a, b)) return std::nullopt;
  std::vector<Coord> lo(a.rank()), hi(a.rank());
  for (std::size_t k = 0; k < a.rank(); ++k) {
    lo[k] = std::max(a.lo(k), b.lo(k));
    hi[k] = std::min(a.hi(k), b.hi(k));
  }
  return BoundingBox(std::move(lo), std::move(hi));
}

// Discrete cell-count volume; saturates at uint64 max.
inline std::uint64_t volume(const BoundingBox& b) {
  std::uint64_t v = 1;
  for (std::size_t k = 0; k < b.rank(); ++k) {
    const auto extent = static_cast<std::uint64_t>(b.hi(k) - b.lo(k)) + 1;
    if (v > std::numeric_limits<std::uint64_t>::max() / extent) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    v *= extent;
  }
  return v;
}

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                           : a + b;
}

// Minimal box around the given rows of `cells`.
inline BoundingBox tight_box(const CellSet& cells, std::span<const std::uint32_t> rows) {
  if (rows.empty()) throw UsageError("tight_box of an empty cell set");
  const auto first = cells.coords(rows.front());
  std::vector<Coord> lo(first.begin(), first.end());
  std::vector<Coord> hi = lo;
  for (auto row : rows.subspan(1)) {
    const auto c = cells.coords(row);
    for (std::size_t k = 0; k < lo.size(); ++k) {
      lo[k] = std::min(lo[k], c[k]);
      hi[k] = std::max(hi[k], c[k]);
    }
  }
  return {std::move(lo), std::move(hi)};
}

inline BoundingBox tight_box(const CellSet& cells) {
  std::vector<std::uint32_t> rows(cells.size());
  for (std::uint32_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return tight_box(cells, rows);
}

inline BoundingBox tight_box(std::span<const Cell> cells) {
  if (cells.empty()) throw UsageError("tight_box of an empty cell set");
  std::vector<Coord> lo = cells.front().coords;
  std::vector<Coord> hi = lo;
  for (const auto& c : cells) {
    if (c.coords.size() != lo.size()) throw UsageError("cells of mixed dimensionality");
    for (std::size_t k = 0; k < lo.size(); ++k) {
      lo[k] = std::min(lo[k], c.coords[k]);
      hi[k] = std::max(hi[k], c.coords[k]);
    }
  }
  return {std::move(lo), std::move(hi)};
}

// Grows every face by r, clamped to the schema domain.
inline BoundingBox expand(const BoundingBox& b, std::uint64_t r, const ArraySchema& schema) {
  if (b.rank() != schema.rank()) throw UsageError("box and schema rank differ");
  const auto rr = static_cast<Coord>(std::min<std::uint64_t>(r, std::numeric_limits<Coord>::max() / 4));
  std::vector<Coord> lo(b.rank()), hi(b.rank());
  for (std::size_t k = 0; k < b.rank(); ++k) {
    const auto& d = schema.dims()[k];
    lo[k] = std::max(d.lo, std::min(b.lo(k), d.hi) - rr);
    hi[k] = std::min(d.hi, std::max(b.hi(k), d.lo) + rr);
  }
  return {std::move(lo), std::move(hi)};
}

inline std::uint64_t l1_distance(std::span<const Coord> a, std::span<const Coord> b) {
  std::uint64_t d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    d += static_cast<std::uint64_t>(a[k] > b[k] ? a[k] - b[k] : b[k] - a[k]);
  }
  return d;
}

}  // namespace arraycache

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

#include "arraycache/array.hpp"

#include <random>

#include <gtest/gtest.h>

#include "arraycache/errors.hpp"

namespace arraycache {
namespace {

BoundingBox box(std::vector<Coord> lo, std::vector<Coord> hi) { return BoundingBox(std::move(lo), std::move(hi)); }

const ArraySchema kSchema({{"i", 1, 6}, {"j", 1, 8}}, {{"v", AttrKind::kFloat}});

TEST(BoundingBoxTest, RejectsInvertedOrEmptyRanges) {
  EXPECT_THROW(box({3}, {2}), UsageError);
  EXPECT_THROW(box({}, {}), UsageError);
  EXPECT_THROW(box({1, 1}, {2}), UsageError);
}

TEST(SchemaTest, ValidatesDimensionsAndNames) {
  EXPECT_THROW(ArraySchema({}, {}), UsageError);
  EXPECT_THROW(ArraySchema({{"i", 2, 1}}, {}), UsageError);
  EXPECT_THROW(ArraySchema({{"i", 1, 2}, {"i", 1, 2}}, {}), UsageError);
  EXPECT_THROW(ArraySchema({{"i", 1, 2}}, {{"a", AttrKind::kInt}, {"a", AttrKind::kInt}}), UsageError);
}

TEST(SchemaTest, DefaultRecordWidthIsEightBytesPerField) {
  EXPECT_EQ(kSchema.cell_record_bytes(), 24u);
  EXPECT_EQ(ArraySchema({{"i", 1, 2}}, {}, 100).cell_record_bytes(), 100u);
}

TEST(BoxIntersectTest, Examples) {
  EXPECT_EQ(box_intersect(box({1, 1}, {6, 8}), box({1, 1}, {6, 8})), box({1, 1}, {6, 8}));
  EXPECT_FALSE(box_intersect(box({1, 1}, {2, 2}), box({3, 1}, {4, 2})).has_value());
  EXPECT_EQ(box_intersect(box({1, 2}, {4, 5}), box({3, 1}, {6, 3})), box({3, 2}, {4, 3}));
}

TEST(BoxIntersectTest, RankMismatchIsUsageError) {
  EXPECT_THROW(box_intersect(box({1}, {2}), box({1, 1}, {2, 2})), UsageError);
}

TEST(VolumeTest, Examples) {
  EXPECT_EQ(volume(box({1, 1}, {1, 1})), 1u);
  EXPECT_EQ(volume(box({1, 1}, {6, 8})), 48u);
  EXPECT_EQ(volume(box({1, 1}, {1, 5})), 5u);
}

TEST(VolumeTest, SaturatesInsteadOfOverflowing) {
  const Coord big = std::numeric_limits<Coord>::max() / 2;
  EXPECT_EQ(volume(box({0, 0, 0}, {big, big, big})), std::numeric_limits<std::uint64_t>::max());
}

TEST(TightBoxTest, Examples) {
  CellSet one(2, 0);
  one.add(std::vector<Coord>{3, 4});
  EXPECT_EQ(tight_box(one), box({3, 4}, {3, 4}));

  CellSet two(2, 0);
  two.add(std::vector<Coord>{1, 1});
  two.add(std::vector<Coord>{6, 5});
  EXPECT_EQ(tight_box(two), box({1, 1}, {6, 5}));

  const std::vector<Cell> three = {{{1, 3}, {}}, {{2, 3}, {}}, {{2, 2}, {}}};
  EXPECT_EQ(tight_box(three), box({1, 2}, {2, 3}));
}

TEST(TightBoxTest, EmptySetIsUsageError) {
  EXPECT_THROW(tight_box(CellSet(2, 0)), UsageError);
  EXPECT_THROW(tight_box(std::vector<Cell>{}), UsageError);
}

TEST(ExpandTest, Examples) {
  EXPECT_EQ(expand(box({2, 2}, {3, 3}), 0, kSchema), box({2, 2}, {3, 3}));
  EXPECT_EQ(expand(box({2, 2}, {3, 3}), 1, kSchema), box({1, 1}, {4, 4}));
  EXPECT_EQ(expand(box({1, 1}, {2, 2}), 1, kSchema), box({1, 1}, {3, 3}));
}

TEST(CellSetTest, StoresRowsAndDefaultsMissingAttributes) {
  CellSet cs(2, 1);
  cs.add(std::vector<Coord>{1, 2});
  cs.add(std::vector<Coord>{3, 4}, std::vector<AttrValue>{2.5});
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs.cell(1), (Cell{{3, 4}, {2.5}}));
  EXPECT_EQ(std::get<std::int64_t>(cs.attrs(0)[0]), 0);
  EXPECT_THROW(cs.add(std::vector<Coord>{1}), UsageError);
}

// Random boxes inside a 20x20x20 cube.
class BoxProperties : public ::testing::Test {
 protected:
  BoundingBox random_box() {
    std::vector<Coord> lo(3), hi(3);
    for (int k = 0; k < 3; ++k) {
      Coord a = dist_(rng_), b = dist_(rng_);
      lo[k] = std::min(a, b);
      hi[k] = std::max(a, b);
    }
    return {lo, hi};
  }

  std::mt19937_64 rng_{7};
  std::uniform_int_distribution<Coord> dist_{1, 20};
  ArraySchema schema_{{{"a", 1, 20}, {"b", 1, 20}, {"c", 1, 20}}, {}};
};

TEST_F(BoxProperties, IntersectionIsSymmetricAndContained) {
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_box(), b = random_box();
    const auto ab = box_intersect(a, b), ba = box_intersect(b, a);
    ASSERT_EQ(ab, ba);
    ASSERT_EQ(ab.has_value(), intersects(a, b));
    if (ab) {
      ASSERT_TRUE(a.contains(*ab));
      ASSERT_TRUE(b.contains(*ab));
    }
  }
}

TEST_F(BoxProperties, VolumeIsMonotoneUnderContainment) {
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_box(), b = random_box();
    if (auto ab = box_intersect(a, b)) {
      ASSERT_LE(volume(*ab), volume(a));
      ASSERT_LE(volume(*ab), volume(b));
    }
  }
}

TEST_F(BoxProperties, TightBoxIsIdempotent) {
  for (int i = 0; i < 500; ++i) {
    CellSet cs(3, 0);
    const int n = 1 + i % 9;
    for (int p = 0; p < n; ++p) cs.add(std::vector<Coord>{dist_(rng_), dist_(rng_), dist_(rng_)});
    const auto b = tight_box(cs);
    CellSet inside(3, 0);
    for (std::size_t r = 0; r < cs.size(); ++r) {
      if (b.contains(cs.coords(r))) inside.add(cs.coords(r));
    }
    ASSERT_EQ(tight_box(inside), b);
  }
}

TEST_F(BoxProperties, ExpandIsIdentityAtZeroAndMonotone) {
  for (int i = 0; i < 1000; ++i) {
    const auto b = random_box();
    ASSERT_EQ(expand(b, 0, schema_), b);
    for (std::uint64_t r = 0; r < 4; ++r) ASSERT_TRUE(expand(b, r + 1, schema_).contains(expand(b, r, schema_)));
  }
}

}  // namespace
}  // namespace arraycache

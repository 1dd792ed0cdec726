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

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <type_traits>

namespace arraycache {

enum class NodeId : std::uint32_t {};
enum class ChunkId : std::uint64_t {};

template <typename E>
constexpr auto to_underlying(E e) noexcept {
  return static_cast<std::underlying_type_t<E>>(e);
}

// The j-th raw file stored on node i.
struct FileId {
  NodeId node{};
  std::uint32_t index = 0;

  friend auto operator<=>(const FileId&, const FileId&) = default;
};

inline std::string to_string(NodeId n) {
  return "n" + std::to_string(to_underlying(n));
}

inline std::string to_string(ChunkId c) {
  return "c" + std::to_string(to_underlying(c));
}

inline std::string to_string(const FileId& f) {
  return "f" + std::to_string(to_underlying(f.node)) + "." + std::to_string(f.index);
}

}  // namespace arraycache

template <>
struct std::hash<arraycache::FileId> {
  std::size_t operator()(const arraycache::FileId& f) const noexcept {
    return (static_cast<std::size_t>(arraycache::to_underlying(f.node)) << 32) ^ f.index;
  }
};

// Copyright 2026 The Firescape Authors
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
#include <ostream>
#include <string>
#include <string_view>

namespace firescape {

/// Integer drone identifier tagged by role so coordinator and service drone
/// ids cannot be mixed up. Renders as "<prefix>-<n>", e.g. "cd-3".
template <class Tag>
struct DroneId {
  int value = 0;

  friend auto operator<=>(const DroneId&, const DroneId&) = default;

  std::string str() const { return std::string(Tag::kPrefix) + "-" + std::to_string(value); }

  /// Parses "cd-3" style strings; throws ParseError on anything else.
  static DroneId parse(std::string_view text);
};

struct CdTag {
  static constexpr std::string_view kPrefix = "cd";
};
struct SdTag {
  static constexpr std::string_view kPrefix = "sd";
};

using CdId = DroneId<CdTag>;
using SdId = DroneId<SdTag>;

template <class Tag>
std::ostream& operator<<(std::ostream& os, const DroneId<Tag>& id) {
  return os << id.str();
}

/// 128-bit request identifier laid out like a version-4 UUID.
struct RequestId {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  friend auto operator<=>(const RequestId&, const RequestId&) = default;

  std::string str() const;
  static RequestId parse(std::string_view text);
};

inline std::ostream& operator<<(std::ostream& os, const RequestId& id) { return os << id.str(); }

}  // namespace firescape

template <>
struct std::hash<firescape::RequestId> {
  std::size_t operator()(const firescape::RequestId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.hi ^ (id.lo * 0x9E3779B97F4A7C15ULL));
  }
};

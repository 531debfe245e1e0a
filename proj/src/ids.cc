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

#include "firescape/ids.h"

#include <charconv>

#include <fmt/format.h>

#include "firescape/errors.h"

namespace firescape {

template <class Tag>
DroneId<Tag> DroneId<Tag>::parse(std::string_view text) {
  const std::string_view prefix = Tag::kPrefix;
  if (text.size() <= prefix.size() + 1 || text.substr(0, prefix.size()) != prefix ||
      text[prefix.size()] != '-') {
    throw ParseError(fmt::format("bad drone id '{}', expected {}-<n>", text, prefix));
  }
  const std::string_view digits = text.substr(prefix.size() + 1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || value < 0) {
    throw ParseError(fmt::format("bad drone id '{}', expected {}-<n>", text, prefix));
  }
  return DroneId{value};
}

template struct DroneId<CdTag>;
template struct DroneId<SdTag>;

std::string RequestId::str() const {
  return fmt::format("{:08x}-{:04x}-{:04x}-{:04x}-{:012x}", hi >> 32, (hi >> 16) & 0xFFFF, hi & 0xFFFF,
                     lo >> 48, lo & 0xFFFFFFFFFFFFULL);
}

RequestId RequestId::parse(std::string_view text) {
  if (text.size() != 36 || text[8] != '-' || text[13] != '-' || text[18] != '-' || text[23] != '-') {
    throw ParseError(fmt::format("bad request id '{}'", text));
  }
  std::string hex;
  hex.reserve(32);
  for (char c : text) {
    if (c != '-') hex.push_back(c);
  }
  auto parse_half = [&](std::string_view half) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(half.data(), half.data() + half.size(), v, 16);
    if (ec != std::errc{} || ptr != half.data() + half.size()) {
      throw ParseError(fmt::format("bad request id '{}'", text));
    }
    return v;
  };
  const std::string_view h(hex);
  return RequestId{parse_half(h.substr(0, 16)), parse_half(h.substr(16))};
}

}  // namespace firescape

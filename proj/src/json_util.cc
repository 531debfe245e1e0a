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

#include "json_util.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "firescape/errors.h"

namespace firescape::detail {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json parse_json(std::string_view text, const std::string& origin) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto head = text.substr(0, upto);
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(head.begin(), head.end(), '\n'));
    const std::size_t nl = head.rfind('\n');
    const std::size_t col = nl == std::string_view::npos ? upto + 1 : upto - nl;
    throw ParseError(fmt::format("{}:{}:{}: malformed JSON ({})", origin, line, col, e.what()));
  }
}

Json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

double number_at(const Json& obj, const char* key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ParseError(fmt::format("{}: missing or non-numeric '{}'", context, key));
  }
  return it->get<double>();
}

void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& context) {
  if (!obj.is_object()) throw ParseError(fmt::format("{}: expected a JSON object", context));
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParseError(fmt::format("{}: unknown key '{}'", context, key));
    }
  }
}

GeoPoint position_to_point(const Json& pos, const std::string& context) {
  if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
    throw ParseError(fmt::format("{}: position must be [lon, lat]", context));
  }
  GeoPoint p{pos[1].get<double>(), pos[0].get<double>()};
  if (!is_valid(p)) {
    throw ParseError(fmt::format("{}: coordinate out of range (lon {}, lat {})", context, p.lon, p.lat));
  }
  return p;
}

}  // namespace firescape::detail

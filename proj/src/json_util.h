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

// Internal helpers shared by the file readers.

#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "firescape/geo.h"

namespace firescape::detail {

using Json = nlohmann::json;

std::string read_text_file(const std::filesystem::path& path);

/// Parses text as JSON; ParseError carries "<origin>:<line>:<col>".
Json parse_json(std::string_view text, const std::string& origin);

Json read_json_file(const std::filesystem::path& path);

/// Required numeric member; ParseError names `context` and the key.
double number_at(const Json& obj, const char* key, const std::string& context);

/// ParseError if obj has any key outside `allowed`.
void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& context);

/// GeoJSON position [lon, lat, (alt)] to GeoPoint.
GeoPoint position_to_point(const Json& pos, const std::string& context);

}  // namespace firescape::detail

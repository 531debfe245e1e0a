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

#include "firescape/log.h"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <string>

namespace firescape::log {
namespace {

Level from_env() {
  const char* raw = std::getenv("FIRESCAPE_VERBOSITY");
  if (raw == nullptr) return Level::kWarn;
  const std::string v(raw);
  if (v == "quiet") return Level::kQuiet;
  if (v == "info") return Level::kInfo;
  if (v == "debug") return Level::kDebug;
  return Level::kWarn;
}

std::atomic<int>& current() {
  static std::atomic<int> level{static_cast<int>(from_env())};
  return level;
}

void emit(Level level, std::string_view tag, std::string_view msg) {
  if (static_cast<int>(level) > current().load()) return;
  std::clog << tag << msg << '\n';
}

}  // namespace

Level verbosity() { return static_cast<Level>(current().load()); }
void set_verbosity(Level level) { current().store(static_cast<int>(level)); }

void warn(std::string_view msg) { emit(Level::kWarn, "warning: ", msg); }
void info(std::string_view msg) { emit(Level::kInfo, "", msg); }
void debug(std::string_view msg) { emit(Level::kDebug, "debug: ", msg); }

}  // namespace firescape::log

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

#include <stdexcept>
#include <string>

namespace firescape {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Malformed input file or configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input parsed but is structurally invalid (dangling edge, bad ring...).
class LoadError : public Error {
 public:
  using Error::Error;
};

// Illegal request status transition or monotonicity breach.
class StateError : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// No live replica can serve the operation. Retriable once replicas return.
class Unavailable : public Error {
 public:
  using Error::Error;
};

// Situations the fleet cannot resolve by itself and must hand to the base
// station: total coordinator loss, total SD loss, energy infeasibility.
class Escalation : public Error {
 public:
  using Error::Error;
};

}  // namespace firescape

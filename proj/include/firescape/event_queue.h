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

#include <cstdint>
#include <queue>
#include <vector>

#include "firescape/errors.h"
#include "firescape/request.h"

namespace firescape {

/// Min-queue of timestamped payloads. Equal times pop in push order.
template <class Payload>
class EventQueue {
 public:
  struct Item {
    SimTime t = 0;
    std::uint64_t seq = 0;
    Payload payload;
  };

  void push(SimTime t, Payload payload) { heap_.push(Item{t, next_seq_++, std::move(payload)}); }

  Item pop() {
    if (heap_.empty()) throw ContractViolation("pop from empty event queue");
    Item top = heap_.top();
    heap_.pop();
    return top;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  SimTime next_time() const { return heap_.top().t; }

 private:
  struct Later {
    bool operator()(const Item& a, const Item& b) const { return a.t != b.t ? a.t > b.t : a.seq > b.seq; }
  };

  std::priority_queue<Item, std::vector<Item>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace firescape

// Copyright 2026 The sprace Authors
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

#ifndef SPRACE_RFPOSET_HPP_
#define SPRACE_RFPOSET_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sprace/trace.hpp"

namespace sprace {

struct RfEvent {
  uint32_t id = 0;  // external id, unique
  std::string thread;
  bool is_write = false;
  std::string var;
};

// Events plus a partial order and a reads-from map. Thread order (the order
// events of one thread appear in `events`) is always part of the order;
// `edges` carries the cross-thread and extra constraints. `distinguished`
// is the (write, read, interfering-write) triplet of a reverse-realizability
// instance.
struct RfPoset {
  std::vector<RfEvent> events;
  std::vector<std::pair<uint32_t, uint32_t>> edges;  // external ids
  std::map<uint32_t, uint32_t> rf;                   // read id -> write id
  std::optional<std::array<uint32_t, 3>> distinguished;

  const RfEvent* find(uint32_t id) const;
};

// Structural validation: ids unique, rf well-typed (read -> same-variable
// write), order acyclic, distinguished triplet well-formed.
std::vector<std::string> validate_rfposet(const RfPoset& poset);

// A reverse-realizability instance: a poset with a distinguished triplet and
// a witness linearization (external ids) that orders the interfering write
// before the triplet's write.
struct ReverseInstance {
  RfPoset poset;
  std::vector<uint32_t> witness;
};

// Cross-thread orderings of the closure not inferable from tighter orderings
// within the same thread pair.
std::vector<std::pair<uint32_t, uint32_t>> dominant_pairs(const RfPoset& poset);

struct RfPosetLimits {
  uint32_t max_events = 12;        // realizability_bf
  uint32_t max_events_reverse = 64; // reverse instances are larger by design
  uint64_t max_nodes = 50'000'000;
};

// Searches for a linearization whose per-variable last-write-before-read map
// equals rf. Returns the witness (external ids) or nullopt.
std::optional<std::vector<uint32_t>> realizability_bf(const RfPoset& poset,
                                                      const RfPosetLimits& lim = {});

// True iff some rf-respecting linearization orders the distinguished write
// before the distinguished interfering write.
bool reverse_realizability_bf(const RfPoset& poset, const RfPosetLimits& lim = {});

// Builds the reverse-realizability instance for a normalized poset (only
// triplet events; every read observes a thread-local write), including the
// witness. Throws std::invalid_argument when normalization fails.
ReverseInstance build_reverse_instance(const RfPoset& poset);

// Builds the race-prediction trace for a reverse instance; the returned pair
// is (w(y), r(y)) as 1-based event idxs of the trace.
struct RaceInstance {
  Trace trace;
  std::pair<uint32_t, uint32_t> target;
};
RaceInstance build_race_instance(const ReverseInstance& inst);

}  // namespace sprace

#endif  // SPRACE_RFPOSET_HPP_

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

#ifndef SPRACE_ORACLE_BF_HPP_
#define SPRACE_ORACLE_BF_HPP_

#include <functional>
#include <stdexcept>
#include <vector>

#include "sprace/trace.hpp"

namespace sprace {

// Exponential ground truth by explicit enumeration of reorderings. Caps are
// loud errors, never silent truncation.

class SizeCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BfLimits {
  // Bound on the events eligible for reordering. For full enumeration this
  // is the trace length; for pair queries it is the pair's candidate
  // universe, which excludes both events and their thread-order successors.
  uint32_t max_events = 14;
  uint64_t max_nodes = 50'000'000;
};

// Checks conditions (subset, thread-order downward closure and respect,
// last-write preservation, lock semantics) directly on a sequence.
bool is_correct_reordering(const Trace& trace, const std::vector<uint32_t>& seq);
// Additionally: same-lock acquires keep their trace order.
bool is_sync_preserving_reordering(const Trace& trace, const std::vector<uint32_t>& seq);

// Emits every correct reordering (as an event sequence, including the empty
// one) exactly once. Refuses traces longer than `max_events`; raising the
// cap past 20 is itself an error.
void enumerate_correct_reorderings(const Trace& trace, uint32_t max_events,
                                   const std::function<void(const std::vector<uint32_t>&)>& yield);

// True iff some correct reordering leaves both events enabled.
bool is_predictable_race_bf(const Trace& trace, uint32_t e1, uint32_t e2,
                            const BfLimits& limits = {});

// Same, restricted to reorderings that preserve the order of same-lock
// acquires.
bool is_syncp_race_bf(const Trace& trace, uint32_t e1, uint32_t e2,
                      const BfLimits& limits = {});

// Racy (earliest e1, e2) pairs by exhaustive pair queries; the engine's
// ground truth on small traces.
std::vector<std::pair<uint32_t, uint32_t>> syncp_races_bf(const Trace& trace,
                                                          const BfLimits& limits = {});

}  // namespace sprace

#endif  // SPRACE_ORACLE_BF_HPP_

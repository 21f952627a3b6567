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

#ifndef SPRACE_CLOSURE_REF_HPP_
#define SPRACE_CLOSURE_REF_HPP_

#include <optional>

#include "sprace/trace.hpp"

namespace sprace {

// Reference implementations over explicit event sets. Worklist saturation,
// quadratic-ish by design; these are the ground truth the streaming detector
// is tested against.

// Smallest superset of `s` downward-closed under thread order and closed
// under read -> its observed write.
EventSet tl_closure(const Trace& trace, const EventSet& s);

// tl_closure strengthened by: two same-lock acquires in the set imply the
// earlier one's matching release is in the set.
EventSet sp_closure(const Trace& trace, const EventSet& s);

// sp_closure of the thread-order predecessors of the two events.
EventSet sp_ideal(const Trace& trace, uint32_t e1, uint32_t e2);

// True iff (e1, e2) is a sync-preserving race. Requires a conflicting pair
// with e1 < e2 in trace order.
bool is_syncp_race_pair(const Trace& trace, uint32_t e1, uint32_t e2);

// Earliest event of thread `t` before `e` that forms a sync-preserving race
// with `e`, reusing the growing ideal across candidates.
std::optional<uint32_t> syncp_races_with_thread(const Trace& trace, uint32_t e,
                                                uint32_t t);

// All racy later events with their earliest partners, computed pairwise.
// Small traces only; used as the oracle for the streaming engine.
std::vector<std::pair<uint32_t, uint32_t>> syncp_races_ref(const Trace& trace);

}  // namespace sprace

#endif  // SPRACE_CLOSURE_REF_HPP_

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

#ifndef SPRACE_GENERATORS_HPP_
#define SPRACE_GENERATORS_HPP_

#include <cstdint>
#include <string>

#include "sprace/trace.hpp"

namespace sprace {

struct GenConfig {
  uint32_t events = 100;
  uint32_t threads = 2;
  uint32_t locks = 1;
  uint32_t vars = 1;
  double p_read = 0.3;
  double p_write = 0.3;
  double p_sync = 0.4;  // acquire/release moves
  uint64_t seed = 1;
};

// Deterministic in the seed; output always validates. A sync move releases a
// held lock or acquires a free one; when neither is possible it degrades to
// a read so the event count is always met.
Trace gen_random(const GenConfig& config);

// Two-thread equality-language trace over one variable: thread 1 encodes u
// (bit 1 = write, 0 = read), thread 2 encodes v under the complementary
// lock sets, every write additionally wrapped in lock c. The per-position
// lock sets walk the subset lattices of A (cardinality ascending) and B
// (cardinality descending), numeric ascending within a level, which keeps
// every pair of distinct positions lock-separated in exactly one direction.
// The trace has a sync-preserving race iff u != v. Bit strings must have
// equal power-of-two length.
Trace gen_equality(const std::string& u, const std::string& v);

}  // namespace sprace

#endif  // SPRACE_GENERATORS_HPP_

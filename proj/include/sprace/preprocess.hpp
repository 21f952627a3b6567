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

#ifndef SPRACE_PREPROCESS_HPP_
#define SPRACE_PREPROCESS_HPP_

#include <cstdint>
#include <vector>

#include "sprace/trace.hpp"

namespace sprace {

// Lightweight prefilter: a variable whose conflicting accesses are already
// totally ordered by thread order plus write-to-reader data flow cannot race,
// so its accesses are dropped before detection. Sync events always survive;
// surviving events keep their original idx for reporting.

struct FilterResult {
  Trace trace;
  std::vector<bool> dropped_var;           // per var id
  std::vector<uint64_t> dropped_events;    // per var id
  uint64_t total_dropped = 0;
};

FilterResult filter_ordered_variables(const Trace& trace);

// Streaming analysis form: one pass computing which variables are ordered.
class OrderedVarScan {
 public:
  OrderedVarScan(uint32_t threads, uint32_t vars);
  void on_event(Op op, uint32_t t, uint32_t target);
  // true = all conflicting accesses of x ordered (candidate for dropping)
  const std::vector<bool>& ordered() const { return ordered_; }

 private:
  uint32_t threads_, vars_;
  std::vector<uint64_t> clocks_;  // per thread: thread order with fork/join
  std::vector<uint64_t> lwc_;     // per var: closure clock of its last write
  std::vector<uint64_t> acc_;     // per (var, thread): joins from past reads
  std::vector<uint64_t> last_w_;  // per (var, thread): own component, 0 = none
  std::vector<uint64_t> last_r_;
  std::vector<bool> ordered_;
};

}  // namespace sprace

#endif  // SPRACE_PREPROCESS_HPP_

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

#ifndef SPRACE_REPORT_HPP_
#define SPRACE_REPORT_HPP_

#include <cstdint>
#include <vector>

#include "sprace/trace.hpp"

namespace sprace {

// A detected race: `e2` is the event found racy while scanning, `e1` its
// earliest earlier partner. Indexes refer to the original trace.
struct RaceReport {
  uint32_t e1 = 0;
  uint32_t e2 = 0;
  uint32_t var = 0;
  uint32_t t1 = 0;
  uint32_t t2 = 0;
  Op k1 = Op::kRead;
  Op k2 = Op::kRead;
  int32_t loc1 = -1;
  int32_t loc2 = -1;
};

struct Summary {
  uint64_t racy_events = 0;  // distinct racy e2
  uint64_t racy_lines = 0;   // distinct locations of racy e2
  uint64_t racy_vars = 0;
  uint64_t max_distance = 0;  // max idx(e2) - idx(e1)
  double wall_time_s = 0.0;   // never serialized; logging only
};

// Aggregates a report list. Events without a location id count as a distinct
// synthetic line each, keyed by their idx.
Summary summarize(const std::vector<RaceReport>& reports);

}  // namespace sprace

#endif  // SPRACE_REPORT_HPP_

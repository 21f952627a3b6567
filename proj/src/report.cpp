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

#include "sprace/report.hpp"

#include <set>

namespace sprace {

Summary summarize(const std::vector<RaceReport>& reports) {
  Summary s;
  std::set<uint32_t> events, vars;
  // locations, with a per-event synthetic line when no id is attached
  std::set<int64_t> lines;
  for (const RaceReport& r : reports) {
    events.insert(r.e2);
    vars.insert(r.var);
    if (r.loc2 >= 0)
      lines.insert(r.loc2);
    else
      lines.insert(-static_cast<int64_t>(r.e2));
    uint64_t d = r.e2 - r.e1;
    if (d > s.max_distance) s.max_distance = d;
  }
  s.racy_events = events.size();
  s.racy_vars = vars.size();
  s.racy_lines = lines.size();
  return s;
}

}  // namespace sprace

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

#ifndef SPRACE_BASELINES_HPP_
#define SPRACE_BASELINES_HPP_

#include "sprace/report.hpp"
#include "sprace/trace.hpp"

namespace sprace {

// Full-vector-clock baselines, no epoch optimizations.
//
// HB: thread order plus release-to-later-acquire per lock; a race is a
// conflicting pair unordered by HB. Reported per racy event e2 against the
// latest conflicting access of each other thread that is unordered with it.
//
// SHB: HB plus a write-to-reader edge from each read's observed write; a
// conflicting (e1, e2) is racy when e2 opens its thread or e1 is not ordered
// before e2's thread predecessor.
std::vector<RaceReport> hb_run(const Trace& trace);
std::vector<RaceReport> shb_run(const Trace& trace);

// Streaming forms used by the command-line front end.
class HbDetector {
 public:
  HbDetector(uint32_t threads, uint32_t locks, uint32_t vars, bool shb);
  void on_event(Op op, uint32_t t, uint32_t target, uint32_t idx, int32_t loc);
  std::vector<RaceReport> take_reports() { return std::move(reports_); }

 private:
  struct Access {
    uint32_t idx = 0;
    uint64_t own = 0;  // own-component timestamp value
    int32_t loc = -1;
  };
  uint32_t threads_, locks_, vars_;
  bool shb_;
  std::vector<uint64_t> clocks_;    // per thread
  std::vector<uint64_t> rel_;      // per lock
  std::vector<uint64_t> lwc_;      // per var, SHB only: clock of last write
  std::vector<Access> last_write_;  // per (var, thread)
  std::vector<Access> last_read_;   // per (var, thread)
  std::vector<RaceReport> reports_;

  uint64_t* clock_of(uint32_t t) { return clocks_.data() + static_cast<size_t>(t) * threads_; }
  Access& lw_at(uint32_t x, uint32_t t) { return last_write_[static_cast<size_t>(x) * threads_ + t]; }
  Access& lr_at(uint32_t x, uint32_t t) { return last_read_[static_cast<size_t>(x) * threads_ + t]; }
};

}  // namespace sprace

#endif  // SPRACE_BASELINES_HPP_

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

#ifndef SPRACE_SYNCP_HPP_
#define SPRACE_SYNCP_HPP_

#include <cstdint>
#include <vector>

#include "sprace/report.hpp"
#include "sprace/trace.hpp"
#include "sprace/vclock.hpp"

namespace sprace {

struct SyncPOptions {
  bool record_timestamps = false;  // keep per-event timestamps for tests
  bool collect_stats = false;
};

struct SyncPStats {
  uint64_t access_entries = 0;
  uint64_t cs_entries = 0;
  uint64_t access_consumed = 0;  // consumer-offset advances over access queues
  uint64_t cs_consumed = 0;      // consumer-offset advances over section queues
  uint64_t fixpoint_calls = 0;
  uint64_t fixpoint_rounds = 0;
};

// Single-pass sync-preserving race detector. One instance owns its state
// exclusively and consumes one trace front to back; feed events through the
// handlers in trace order. Dimensions must cover every id fed in, which the
// callers obtain from a pre-scan.
//
// State per conflicting tuple (earlier thread, current thread, kinds, var):
// a vector-clock ideal plus start offsets into the shared per-(thread,lock)
// critical-section queues and the shared per-(thread,kind,var) access
// queues. Shared queue entries are appended once and consumed at most once
// per offset; a consumed prefix stays addressable so the last consumed
// section per view can still contribute its release clock later.
class SyncPDetector {
 public:
  SyncPDetector(uint32_t threads, uint32_t locks, uint32_t vars,
                SyncPOptions opts = {});

  void on_read(uint32_t t, uint32_t x, uint32_t idx, int32_t loc);
  void on_write(uint32_t t, uint32_t x, uint32_t idx, int32_t loc);
  void on_acquire(uint32_t t, uint32_t l, uint32_t idx);
  void on_release(uint32_t t, uint32_t l, uint32_t idx);
  void on_fork(uint32_t t, uint32_t child, uint32_t idx);
  void on_join(uint32_t t, uint32_t child, uint32_t idx);

  void on_event(Op op, uint32_t t, uint32_t target, uint32_t idx, int32_t loc);

  const std::vector<RaceReport>& reports() const { return reports_; }
  std::vector<RaceReport> take_reports() { return std::move(reports_); }
  const SyncPStats& stats() const { return stats_; }

  // Timestamp of event idx (record_timestamps only).
  VectorTimestamp timestamp_of(uint32_t idx) const;

  // (acquire counter, release seen) per section of one (thread, lock) queue;
  // test hook.
  std::vector<std::pair<uint64_t, bool>> cs_entries(uint32_t t, uint32_t l) const;

  uint64_t state_bytes() const;  // rough live-state footprint

 private:
  static constexpr uint32_t kPairWW = 0;  // earlier write, current write
  static constexpr uint32_t kPairWR = 1;  // earlier write, current read
  static constexpr uint32_t kPairRW = 2;  // earlier read, current write

  struct AccessQueue {
    std::vector<uint64_t> clocks;  // stride 2*width: C_prev then C
    std::vector<uint32_t> idx;
    std::vector<int32_t> loc;
    uint32_t size() const { return static_cast<uint32_t>(idx.size()); }
  };

  struct CsQueue {
    std::vector<uint64_t> g;
    std::vector<uint64_t> clocks;  // stride 2*width: C_acq then C_rel
    std::vector<uint8_t> rel_set;
    uint32_t size() const { return static_cast<uint32_t>(g.size()); }
  };

  uint32_t tuple_id(uint32_t u, uint32_t t, uint32_t pk, uint32_t x) const {
    return ((x * threads_ + u) * threads_ + t) * 3 + pk;
  }
  uint32_t aq_id(uint32_t t, bool is_write, uint32_t x) const {
    return (x * threads_ + t) * 2 + (is_write ? 1 : 0);
  }
  uint32_t cs_id(uint32_t t, uint32_t l) const { return t * locks_ + l; }

  uint64_t* clock_of(uint32_t t) { return clocks_.data() + static_cast<size_t>(t) * threads_; }
  uint64_t* lw_of(uint32_t x) { return lw_.data() + static_cast<size_t>(x) * threads_; }
  uint64_t* ideal_of(uint32_t tuple) { return ideals_.data() + static_cast<size_t>(tuple) * threads_; }

  void bump(uint32_t t, uint32_t idx);
  void push_access(uint32_t t, bool is_write, uint32_t x, const uint64_t* c_prev,
                   uint32_t idx, int32_t loc);
  // Scans the pending accesses of `u` of kind `a1` against the tuple's
  // ideal; returns the queue position of the first racy entry or -1.
  int64_t check_race(uint32_t tuple, uint32_t u, bool a1_write, uint32_t x,
                     uint64_t* ideal);
  void close_ideal(uint32_t tuple, uint64_t* ideal);

  uint32_t threads_, locks_, vars_;
  SyncPOptions opts_;

  std::vector<uint64_t> clocks_;  // per thread
  std::vector<uint64_t> lw_;      // per var
  std::vector<uint64_t> gl_;      // per lock acquire counter
  std::vector<AccessQueue> access_;
  std::vector<CsQueue> cs_;
  std::vector<uint64_t> ideals_;       // per tuple
  std::vector<uint32_t> acc_off_;      // per tuple
  std::vector<uint32_t> cs_off_;       // per tuple x (thread,lock)
  std::vector<uint64_t> scratch_;      // fixpoint probe results

  std::vector<RaceReport> reports_;
  SyncPStats stats_;
  std::vector<uint64_t> recorded_;  // per event when record_timestamps
  uint32_t last_idx_ = 0;
};

std::vector<RaceReport> run_syncp(const Trace& trace, SyncPOptions opts = {});

// run_syncp plus recorded per-event timestamps, for tests.
std::pair<std::vector<RaceReport>, std::vector<VectorTimestamp>> run_syncp_timestamps(
    const Trace& trace);

}  // namespace sprace

#endif  // SPRACE_SYNCP_HPP_

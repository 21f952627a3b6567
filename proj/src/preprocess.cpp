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

#include "sprace/preprocess.hpp"

#include "sprace/vclock.hpp"

namespace sprace {

// A variable is judged by the closure of thread order (with fork/join)
// plus its own write-to-reader edges; edges of other variables do not order
// its accesses. The per-(var, thread) accumulator holds the joins a thread
// picked up through its past reads of that variable, so an access's
// effective clock is the thread's order clock joined with the accumulator.
//
// A pair counts as ordered only when the earlier access reaches the later
// one's thread predecessor. Reaching the access itself is not enough: a read
// is orderable against the write it observes, yet the two can still be
// enabled side by side, so that edge must not excuse the pair.
OrderedVarScan::OrderedVarScan(uint32_t threads, uint32_t vars)
    : threads_(threads ? threads : 1), vars_(vars) {
  clocks_.assign(static_cast<size_t>(threads_) * threads_, 0);
  lwc_.assign(static_cast<size_t>(vars_) * threads_, 0);
  acc_.assign(static_cast<size_t>(vars_) * threads_ * threads_, 0);
  last_w_.assign(static_cast<size_t>(vars_) * threads_, 0);
  last_r_.assign(static_cast<size_t>(vars_) * threads_, 0);
  ordered_.assign(vars_, true);
}

void OrderedVarScan::on_event(Op op, uint32_t t, uint32_t target) {
  uint64_t* c = clocks_.data() + static_cast<size_t>(t) * threads_;
  switch (op) {
    case Op::kRead: {
      uint64_t* acc = acc_.data() + (static_cast<size_t>(target) * threads_ + t) * threads_;
      if (ordered_[target]) {
        for (uint32_t u = 0; u < threads_; ++u) {
          if (u == t) continue;
          uint64_t known = std::max(c[u], acc[u]);
          if (last_w_[static_cast<size_t>(target) * threads_ + u] > known)
            ordered_[target] = false;
        }
      }
      // later accesses of this thread know the observed write's past
      vc::join_into(acc, lwc_.data() + static_cast<size_t>(target) * threads_, threads_);
      c[t] += 1;
      last_r_[static_cast<size_t>(target) * threads_ + t] = c[t];
      break;
    }
    case Op::kWrite: {
      const uint64_t* acc =
          acc_.data() + (static_cast<size_t>(target) * threads_ + t) * threads_;
      if (ordered_[target]) {
        for (uint32_t u = 0; u < threads_; ++u) {
          if (u == t) continue;
          uint64_t known = std::max(c[u], acc[u]);
          if (last_w_[static_cast<size_t>(target) * threads_ + u] > known ||
              last_r_[static_cast<size_t>(target) * threads_ + u] > known)
            ordered_[target] = false;
        }
      }
      c[t] += 1;
      uint64_t* lw = lwc_.data() + static_cast<size_t>(target) * threads_;
      for (uint32_t u = 0; u < threads_; ++u) lw[u] = std::max(c[u], acc[u]);
      last_w_[static_cast<size_t>(target) * threads_ + t] = c[t];
      break;
    }
    case Op::kAcquire:
    case Op::kRelease:
      c[t] += 1;  // lock edges are not part of this ordering
      break;
    case Op::kFork:
      c[t] += 1;
      vc::join_into(clocks_.data() + static_cast<size_t>(target) * threads_, c, threads_);
      break;
    case Op::kJoin:
      c[t] += 1;
      vc::join_into(c, clocks_.data() + static_cast<size_t>(target) * threads_, threads_);
      break;
  }
}

FilterResult filter_ordered_variables(const Trace& trace) {
  OrderedVarScan scan(trace.num_threads(), trace.num_vars());
  for (uint32_t i = 1; i <= trace.size(); ++i) {
    const Event& e = trace.event(i);
    scan.on_event(e.op, e.thread, e.target);
  }
  FilterResult res;
  res.dropped_var = scan.ordered();
  res.dropped_events.assign(trace.num_vars(), 0);
  std::vector<bool> keep(trace.size() + 1, true);
  for (uint32_t i = 1; i <= trace.size(); ++i) {
    const Event& e = trace.event(i);
    if (is_access(e.op) && res.dropped_var[e.target]) {
      keep[i] = false;
      ++res.dropped_events[e.target];
      ++res.total_dropped;
    }
  }
  res.trace = trace.filtered_copy(keep);
  return res;
}

}  // namespace sprace

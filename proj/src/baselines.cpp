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

#include "sprace/baselines.hpp"

#include "sprace/vclock.hpp"

namespace sprace {

HbDetector::HbDetector(uint32_t threads, uint32_t locks, uint32_t vars, bool shb)
    : threads_(threads ? threads : 1), locks_(locks), vars_(vars), shb_(shb) {
  clocks_.assign(static_cast<size_t>(threads_) * threads_, 0);
  rel_.assign(static_cast<size_t>(locks_) * threads_, 0);
  if (shb_) lwc_.assign(static_cast<size_t>(vars_) * threads_, 0);
  last_write_.assign(static_cast<size_t>(vars_) * threads_, {});
  last_read_.assign(static_cast<size_t>(vars_) * threads_, {});
}

void HbDetector::on_event(Op op, uint32_t t, uint32_t target, uint32_t idx,
                          int32_t loc) {
  uint64_t* c = clock_of(t);
  switch (op) {
    case Op::kRead: {
      // the comparison point happens to coincide: e2's timestamp for HB
      // (accesses join nothing) and prev(e2)'s for SHB are both the clock
      // before this event
      for (uint32_t u = 0; u < threads_; ++u) {
        if (u == t) continue;
        const Access& w = lw_at(target, u);
        if (w.idx != 0 && w.own > c[u])
          reports_.push_back({w.idx, idx, target, u, t, Op::kWrite, Op::kRead,
                              w.loc, loc});
      }
      c[t] += 1;
      if (shb_) vc::join_into(c, lwc_.data() + static_cast<size_t>(target) * threads_, threads_);
      lr_at(target, t) = {idx, c[t], loc};
      break;
    }
    case Op::kWrite: {
      for (uint32_t u = 0; u < threads_; ++u) {
        if (u == t) continue;
        const Access& w = lw_at(target, u);
        if (w.idx != 0 && w.own > c[u])
          reports_.push_back({w.idx, idx, target, u, t, Op::kWrite, Op::kWrite,
                              w.loc, loc});
        const Access& r = lr_at(target, u);
        if (r.idx != 0 && r.own > c[u])
          reports_.push_back({r.idx, idx, target, u, t, Op::kRead, Op::kWrite,
                              r.loc, loc});
      }
      c[t] += 1;
      if (shb_) vc::copy(lwc_.data() + static_cast<size_t>(target) * threads_, c, threads_);
      lw_at(target, t) = {idx, c[t], loc};
      break;
    }
    case Op::kAcquire:
      c[t] += 1;
      vc::join_into(c, rel_.data() + static_cast<size_t>(target) * threads_, threads_);
      break;
    case Op::kRelease:
      c[t] += 1;
      vc::copy(rel_.data() + static_cast<size_t>(target) * threads_, c, threads_);
      break;
    case Op::kFork:
      c[t] += 1;
      vc::join_into(clock_of(target), c, threads_);
      break;
    case Op::kJoin:
      c[t] += 1;
      vc::join_into(c, clock_of(target), threads_);
      break;
  }
}

namespace {

std::vector<RaceReport> run_detector(const Trace& trace, bool shb) {
  HbDetector d(trace.num_threads(), trace.num_locks(), trace.num_vars(), shb);
  for (uint32_t i = 1; i <= trace.size(); ++i) {
    const Event& e = trace.event(i);
    d.on_event(e.op, e.thread, e.target, trace.orig_idx(i), e.loc);
  }
  return d.take_reports();
}

}  // namespace

std::vector<RaceReport> hb_run(const Trace& trace) { return run_detector(trace, false); }
std::vector<RaceReport> shb_run(const Trace& trace) { return run_detector(trace, true); }

}  // namespace sprace

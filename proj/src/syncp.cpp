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

#include "sprace/syncp.hpp"

#include <cassert>
#include <stdexcept>

namespace sprace {

SyncPDetector::SyncPDetector(uint32_t threads, uint32_t locks, uint32_t vars,
                             SyncPOptions opts)
    : threads_(threads), locks_(locks), vars_(vars), opts_(opts) {
  if (threads == 0) threads_ = 1;
  clocks_.assign(static_cast<size_t>(threads_) * threads_, 0);
  lw_.assign(static_cast<size_t>(vars_) * threads_, 0);
  gl_.assign(locks_, 0);
  access_.resize(static_cast<size_t>(vars_) * threads_ * 2);
  cs_.resize(static_cast<size_t>(threads_) * locks_);
  size_t tuples = static_cast<size_t>(vars_) * threads_ * threads_ * 3;
  ideals_.assign(tuples * threads_, 0);
  acc_off_.assign(tuples, 0);
  cs_off_.assign(tuples * threads_ * locks_, 0);
  scratch_.resize(threads_);
}

void SyncPDetector::bump(uint32_t t, uint32_t idx) {
  assert(t < threads_);  // state was sized by the pre-scan
  assert(idx > last_idx_);
  last_idx_ = idx;
  clock_of(t)[t] += 1;
}

void SyncPDetector::push_access(uint32_t t, bool is_write, uint32_t x,
                                const uint64_t* c_prev, uint32_t idx, int32_t loc) {
  AccessQueue& q = access_[aq_id(t, is_write, x)];
  size_t base = q.clocks.size();
  q.clocks.resize(base + 2 * threads_);
  vc::copy(q.clocks.data() + base, c_prev, threads_);
  vc::copy(q.clocks.data() + base + threads_, clock_of(t), threads_);
  q.idx.push_back(idx);
  q.loc.push_back(loc);
  if (opts_.collect_stats) ++stats_.access_entries;
}

// One closure pass per lock: find, per thread, the latest critical section
// whose acquire the ideal contains, then join the releases of all but the
// globally latest one. Repeats until the ideal stops growing. Consumed
// section entries stay visible through the view's offset-1 position so their
// release clocks remain available to later rounds.
void SyncPDetector::close_ideal(uint32_t tuple, uint64_t* ideal) {
  if (opts_.collect_stats) ++stats_.fixpoint_calls;
  const uint32_t w = threads_;
  uint32_t* offs = cs_off_.data() + static_cast<size_t>(tuple) * threads_ * locks_;
  bool changed = true;
  while (changed) {
    changed = false;
    if (opts_.collect_stats) ++stats_.fixpoint_rounds;
    for (uint32_t l = 0; l < locks_; ++l) {
      uint64_t g_max = 0;
      uint32_t t_max = 0;
      // first pass: advance every view past contained acquires, remember the
      // trace-latest contained section
      for (uint32_t t = 0; t < threads_; ++t) {
        const CsQueue& q = cs_[cs_id(t, l)];
        uint32_t& off = offs[t * locks_ + l];
        while (off < q.size() &&
               vc::leq(q.clocks.data() + static_cast<size_t>(off) * 2 * w, ideal, w)) {
          ++off;
          if (opts_.collect_stats) ++stats_.cs_consumed;
        }
        if (off > 0) {
          uint64_t g = q.g[off - 1];
          if (g > g_max) {
            g_max = g;
            t_max = t;
          }
        }
      }
      if (g_max == 0) continue;
      for (uint32_t t = 0; t < threads_; ++t) {
        if (t == t_max) continue;
        uint32_t off = offs[t * locks_ + l];
        if (off == 0) continue;
        const CsQueue& q = cs_[cs_id(t, l)];
        // a contained non-latest section is always complete on valid traces
        assert(q.rel_set[off - 1]);
        const uint64_t* c_rel =
            q.clocks.data() + static_cast<size_t>(off - 1) * 2 * w + w;
        if (vc::join_into(ideal, c_rel, w)) changed = true;
      }
    }
  }
}

int64_t SyncPDetector::check_race(uint32_t tuple, uint32_t u, bool a1_write,
                                  uint32_t x, uint64_t* ideal) {
  const uint32_t w = threads_;
  AccessQueue& q = access_[aq_id(u, a1_write, x)];
  uint32_t& off = acc_off_[tuple];
  while (off < q.size()) {
    const uint64_t* entry = q.clocks.data() + static_cast<size_t>(off) * 2 * w;
    vc::join_into(ideal, entry, w);  // the candidate's own predecessors
    const uint64_t* c = entry + w;
    if (!vc::leq(c, ideal, w)) {
      close_ideal(tuple, ideal);
      if (!vc::leq(c, ideal, w)) return off;  // racy entry stays pending
    }
    ++off;
    if (opts_.collect_stats) ++stats_.access_consumed;
  }
  return -1;
}

void SyncPDetector::on_read(uint32_t t, uint32_t x, uint32_t idx, int32_t loc) {
  assert(x < vars_);
  uint64_t* c = clock_of(t);
  vc::copy(scratch_.data(), c, threads_);  // C_prev
  bump(t, idx);
  vc::join_into(c, lw_of(x), threads_);
  push_access(t, false, x, scratch_.data(), idx, loc);
  if (opts_.record_timestamps) recorded_.insert(recorded_.end(), c, c + threads_);

  uint32_t best_pos = 0, best_u = 0;
  uint32_t best_idx = 0;
  for (uint32_t u = 0; u < threads_; ++u) {
    if (u == t) continue;
    uint32_t tuple = tuple_id(u, t, kPairWR, x);
    uint64_t* ideal = ideal_of(tuple);
    vc::join_into(ideal, scratch_.data(), threads_);
    int64_t pos = check_race(tuple, u, true, x, ideal);
    if (pos >= 0) {
      const AccessQueue& q = access_[aq_id(u, true, x)];
      uint32_t cand = q.idx[static_cast<size_t>(pos)];
      if (best_idx == 0 || cand < best_idx) {
        best_idx = cand;
        best_u = u;
        best_pos = static_cast<uint32_t>(pos);
      }
    }
  }
  if (best_idx != 0) {
    const AccessQueue& q = access_[aq_id(best_u, true, x)];
    reports_.push_back({best_idx, idx, x, best_u, t, Op::kWrite, Op::kRead,
                        q.loc[best_pos], loc});
  }
}

void SyncPDetector::on_write(uint32_t t, uint32_t x, uint32_t idx, int32_t loc) {
  assert(x < vars_);
  uint64_t* c = clock_of(t);
  vc::copy(scratch_.data(), c, threads_);
  bump(t, idx);
  vc::copy(lw_of(x), c, threads_);
  push_access(t, true, x, scratch_.data(), idx, loc);
  if (opts_.record_timestamps) recorded_.insert(recorded_.end(), c, c + threads_);

  uint32_t best_u = 0, best_pos = 0, best_idx = 0;
  bool best_a1_write = false;
  for (uint32_t u = 0; u < threads_; ++u) {
    if (u == t) continue;
    for (bool a1_write : {false, true}) {
      uint32_t tuple = tuple_id(u, t, a1_write ? kPairWW : kPairRW, x);
      uint64_t* ideal = ideal_of(tuple);
      vc::join_into(ideal, scratch_.data(), threads_);
      int64_t pos = check_race(tuple, u, a1_write, x, ideal);
      if (pos >= 0) {
        const AccessQueue& q = access_[aq_id(u, a1_write, x)];
        uint32_t cand = q.idx[static_cast<size_t>(pos)];
        if (best_idx == 0 || cand < best_idx) {
          best_idx = cand;
          best_u = u;
          best_pos = static_cast<uint32_t>(pos);
          best_a1_write = a1_write;
        }
      }
    }
  }
  if (best_idx != 0) {
    const AccessQueue& q = access_[aq_id(best_u, best_a1_write, x)];
    reports_.push_back({best_idx, idx, x, best_u, t,
                        best_a1_write ? Op::kWrite : Op::kRead, Op::kWrite,
                        q.loc[best_pos], loc});
  }
}

void SyncPDetector::on_acquire(uint32_t t, uint32_t l, uint32_t idx) {
  assert(l < locks_);
  bump(t, idx);
  uint64_t* c = clock_of(t);
  if (opts_.record_timestamps) recorded_.insert(recorded_.end(), c, c + threads_);
  CsQueue& q = cs_[cs_id(t, l)];
  assert(q.rel_set.empty() || q.rel_set.back());  // no nested section per (t,l)
  q.g.push_back(++gl_[l]);
  size_t base = q.clocks.size();
  q.clocks.resize(base + 2 * threads_);
  vc::copy(q.clocks.data() + base, c, threads_);
  q.rel_set.push_back(0);
  if (opts_.collect_stats) ++stats_.cs_entries;
}

void SyncPDetector::on_release(uint32_t t, uint32_t l, uint32_t idx) {
  bump(t, idx);
  uint64_t* c = clock_of(t);
  if (opts_.record_timestamps) recorded_.insert(recorded_.end(), c, c + threads_);
  CsQueue& q = cs_[cs_id(t, l)];
  if (q.rel_set.empty() || q.rel_set.back())
    throw std::logic_error("release without open critical section");
  vc::copy(q.clocks.data() + (static_cast<size_t>(q.size()) - 1) * 2 * threads_ + threads_,
           c, threads_);
  q.rel_set.back() = 1;
}

void SyncPDetector::on_fork(uint32_t t, uint32_t child, uint32_t idx) {
  bump(t, idx);
  uint64_t* c = clock_of(t);
  if (opts_.record_timestamps) recorded_.insert(recorded_.end(), c, c + threads_);
  vc::join_into(clock_of(child), c, threads_);
}

void SyncPDetector::on_join(uint32_t t, uint32_t child, uint32_t idx) {
  bump(t, idx);
  vc::join_into(clock_of(t), clock_of(child), threads_);
  if (opts_.record_timestamps) {
    const uint64_t* c = clock_of(t);
    recorded_.insert(recorded_.end(), c, c + threads_);
  }
}

void SyncPDetector::on_event(Op op, uint32_t t, uint32_t target, uint32_t idx,
                             int32_t loc) {
  switch (op) {
    case Op::kRead: on_read(t, target, idx, loc); break;
    case Op::kWrite: on_write(t, target, idx, loc); break;
    case Op::kAcquire: on_acquire(t, target, idx); break;
    case Op::kRelease: on_release(t, target, idx); break;
    case Op::kFork: on_fork(t, target, idx); break;
    case Op::kJoin: on_join(t, target, idx); break;
  }
}

VectorTimestamp SyncPDetector::timestamp_of(uint32_t idx) const {
  if (!opts_.record_timestamps || idx == 0 ||
      static_cast<size_t>(idx) * threads_ > recorded_.size())
    throw std::logic_error("timestamp not recorded");
  VectorTimestamp v(threads_);
  const uint64_t* src = recorded_.data() + static_cast<size_t>(idx - 1) * threads_;
  std::copy(src, src + threads_, v.data().begin());
  return v;
}

std::vector<std::pair<uint64_t, bool>> SyncPDetector::cs_entries(uint32_t t,
                                                                 uint32_t l) const {
  const CsQueue& q = cs_[t * locks_ + l];
  std::vector<std::pair<uint64_t, bool>> out;
  for (uint32_t i = 0; i < q.size(); ++i) out.emplace_back(q.g[i], q.rel_set[i] != 0);
  return out;
}

uint64_t SyncPDetector::state_bytes() const {
  uint64_t b = 0;
  b += clocks_.size() * 8 + lw_.size() * 8 + gl_.size() * 8;
  for (const AccessQueue& q : access_)
    b += q.clocks.size() * 8 + q.idx.size() * 4 + q.loc.size() * 4;
  for (const CsQueue& q : cs_)
    b += q.clocks.size() * 8 + q.g.size() * 8 + q.rel_set.size();
  b += ideals_.size() * 8 + acc_off_.size() * 4 + cs_off_.size() * 4;
  return b;
}

std::vector<RaceReport> run_syncp(const Trace& trace, SyncPOptions opts) {
  SyncPDetector d(trace.num_threads(), trace.num_locks(), trace.num_vars(), opts);
  for (uint32_t i = 1; i <= trace.size(); ++i) {
    const Event& e = trace.event(i);
    d.on_event(e.op, e.thread, e.target, trace.orig_idx(i), e.loc);
  }
  return d.take_reports();
}

std::pair<std::vector<RaceReport>, std::vector<VectorTimestamp>> run_syncp_timestamps(
    const Trace& trace) {
  SyncPOptions opts;
  opts.record_timestamps = true;
  SyncPDetector d(trace.num_threads(), trace.num_locks(), trace.num_vars(), opts);
  for (uint32_t i = 1; i <= trace.size(); ++i) {
    const Event& e = trace.event(i);
    d.on_event(e.op, e.thread, e.target, i, e.loc);
  }
  std::vector<VectorTimestamp> ts;
  ts.push_back(VectorTimestamp(trace.num_threads()));  // slot 0 unused
  for (uint32_t i = 1; i <= trace.size(); ++i) ts.push_back(d.timestamp_of(i));
  return {d.take_reports(), std::move(ts)};
}

}  // namespace sprace

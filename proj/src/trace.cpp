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

#include "sprace/trace.hpp"

#include <cassert>
#include <unordered_map>

namespace sprace {

const char* op_token(Op op) {
  switch (op) {
    case Op::kRead: return "r";
    case Op::kWrite: return "w";
    case Op::kAcquire: return "acq";
    case Op::kRelease: return "rel";
    case Op::kFork: return "fork";
    case Op::kJoin: return "join";
  }
  return "?";
}

uint32_t TraceBuilder::Intern::get(const std::string& name) {
  for (uint32_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  names.push_back(name);
  return static_cast<uint32_t>(names.size()) - 1;
}

TraceBuilder::TraceBuilder() { events_.push_back(Event{}); }

uint32_t TraceBuilder::intern_thread(const std::string& name) { return threads_.get(name); }
uint32_t TraceBuilder::intern_lock(const std::string& name) { return locks_.get(name); }
uint32_t TraceBuilder::intern_var(const std::string& name) { return vars_.get(name); }

void TraceBuilder::add(const std::string& thread, Op op, const std::string& target,
                       int32_t loc) {
  uint32_t t = threads_.get(thread);
  uint32_t tgt;
  switch (op) {
    case Op::kRead:
    case Op::kWrite: tgt = vars_.get(target); break;
    case Op::kAcquire:
    case Op::kRelease: tgt = locks_.get(target); break;
    case Op::kFork:
    case Op::kJoin: tgt = threads_.get(target); break;
    default: tgt = 0;
  }
  add_raw(t, op, tgt, loc);
}

void TraceBuilder::add_raw(uint32_t thread, Op op, uint32_t target, int32_t loc) {
  Event e;
  e.idx = static_cast<uint32_t>(events_.size());
  e.thread = thread;
  e.op = op;
  e.target = target;
  e.loc = loc;
  events_.push_back(e);
}

Trace TraceBuilder::finish() {
  Trace t;
  t.events_ = std::move(events_);
  t.thread_names_ = std::move(threads_.names);
  t.lock_names_ = std::move(locks_.names);
  t.var_names_ = std::move(vars_.names);
  t.build_derived();
  // leave the builder reusable
  events_.clear();
  events_.push_back(Event{});
  threads_.names.clear();
  locks_.names.clear();
  vars_.names.clear();
  return t;
}

void Trace::build_derived() {
  const uint32_t n = size();
  const uint32_t nt = num_threads();
  const uint32_t nl = num_locks();
  const uint32_t nv = num_vars();

  by_thread_.assign(nt, {});
  acquires_.assign(nl, {});
  by_var_.assign(nv, {});
  match_.assign(n + 1, 0);
  lw_.assign(n + 1, 0);
  prev_.assign(n + 1, 0);
  join_src_.assign(n + 1, 0);
  pos_in_thread_.assign(n + 1, 0);
  orig_idx_.resize(n + 1);
  for (uint32_t i = 0; i <= n; ++i) orig_idx_[i] = i;
  violations_.clear();
  num_acquires_ = 0;

  // per-lock holder: (thread, acquire idx), 0 meaning free
  std::vector<std::pair<uint32_t, uint32_t>> holder(nl, {0, 0});
  std::vector<uint32_t> last_write_of_var(nv, 0);
  std::vector<uint32_t> fork_evt(nt, 0);
  std::vector<uint32_t> join_evt(nt, 0);
  std::vector<uint32_t> last_of_thread(nt, 0);

  for (uint32_t i = 1; i <= n; ++i) {
    Event& e = events_[i];
    if (e.idx != i) violations_.push_back({i, "event idx does not match position"});

    if (last_of_thread[e.thread] == 0 && fork_evt[e.thread] != 0)
      prev_[i] = fork_evt[e.thread];
    else
      prev_[i] = last_of_thread[e.thread];
    if (join_evt[e.thread] != 0)
      violations_.push_back({i, "event after join of its thread"});
    last_of_thread[e.thread] = i;
    by_thread_[e.thread].push_back(i);
    pos_in_thread_[i] = static_cast<uint32_t>(by_thread_[e.thread].size());

    switch (e.op) {
      case Op::kRead:
        lw_[i] = last_write_of_var[e.target];
        by_var_[e.target].push_back(i);
        break;
      case Op::kWrite:
        last_write_of_var[e.target] = i;
        by_var_[e.target].push_back(i);
        break;
      case Op::kAcquire: {
        ++num_acquires_;
        auto& h = holder[e.target];
        if (h.second != 0) {
          violations_.push_back(
              {i, h.first == e.thread ? "reentrant acquire" : "acquire of held lock"});
        } else {
          h = {e.thread, i};
        }
        acquires_[e.target].push_back(i);
        break;
      }
      case Op::kRelease: {
        auto& h = holder[e.target];
        if (h.second == 0 || h.first != e.thread) {
          violations_.push_back({i, "release without matching acquire in thread"});
        } else {
          match_[i] = h.second;
          match_[h.second] = i;
          h = {0, 0};
        }
        break;
      }
      case Op::kFork: {
        uint32_t child = e.target;
        if (child == e.thread)
          violations_.push_back({i, "thread forks itself"});
        else if (fork_evt[child] != 0)
          violations_.push_back({i, "fork of already-forked thread"});
        else if (last_of_thread[child] != 0)
          violations_.push_back({i, "fork of already-started thread"});
        else
          fork_evt[child] = i;
        break;
      }
      case Op::kJoin: {
        uint32_t child = e.target;
        if (child == e.thread)
          violations_.push_back({i, "thread joins itself"});
        else if (join_evt[child] != 0)
          violations_.push_back({i, "double join"});
        else {
          join_evt[child] = i;
          join_src_[i] = last_of_thread[child];
        }
        break;
      }
    }
  }
}

std::optional<uint32_t> Trace::match_of(uint32_t idx) const {
  uint32_t m = match_[idx];
  if (m == 0) return std::nullopt;
  return m;
}

std::optional<uint32_t> Trace::prev_of(uint32_t idx) const {
  uint32_t p = prev_[idx];
  if (p == 0) return std::nullopt;
  return p;
}

void Trace::to_preds(uint32_t idx, std::vector<uint32_t>& out) const {
  out.clear();
  if (prev_[idx] != 0) out.push_back(prev_[idx]);
  if (join_src_[idx] != 0) out.push_back(join_src_[idx]);
}

std::optional<uint32_t> Trace::last_write(uint32_t idx) const {
  assert(events_[idx].op == Op::kRead);
  uint32_t w = lw_[idx];
  if (w == 0) return std::nullopt;
  return w;
}

std::set<uint32_t> Trace::locks_held(uint32_t idx) const {
  std::set<uint32_t> held;
  const Event& e = events_[idx];
  for (uint32_t j : by_thread_[e.thread]) {
    const Event& f = events_[j];
    if (f.op == Op::kAcquire) {
      uint32_t m = match_[j];
      if (j <= idx && (m == 0 || m >= idx)) held.insert(f.target);
    }
  }
  return held;
}

bool Trace::enabled(const EventSet& s, uint32_t idx) const {
  if (s.count(idx)) return false;
  if (prev_[idx] != 0 && !s.count(prev_[idx])) return false;
  if (join_src_[idx] != 0 && !s.count(join_src_[idx])) return false;
  return true;
}

bool Trace::to_leq(uint32_t a, uint32_t b) const {
  if (a == b) return true;
  if (a > b) return false;
  // walk b's predecessor chain back to a; fork/join edges make this a small
  // upward search rather than a single chain
  std::vector<uint32_t> stack = {b};
  std::set<uint32_t> seen;
  while (!stack.empty()) {
    uint32_t cur = stack.back();
    stack.pop_back();
    if (cur == a) return true;
    if (cur < a || !seen.insert(cur).second) continue;
    if (prev_[cur] != 0) stack.push_back(prev_[cur]);
    if (join_src_[cur] != 0) stack.push_back(join_src_[cur]);
  }
  return false;
}

Trace Trace::filtered_copy(const std::vector<bool>& keep_event) const {
  TraceBuilder b;
  // preserve interning order so dense ids and names survive the filter
  for (const auto& name : thread_names_) b.intern_thread(name);
  for (const auto& name : lock_names_) b.intern_lock(name);
  for (const auto& name : var_names_) b.intern_var(name);
  std::vector<uint32_t> orig;
  orig.push_back(0);
  for (uint32_t i = 1; i <= size(); ++i) {
    if (!keep_event[i]) continue;
    const Event& e = events_[i];
    b.add_raw(e.thread, e.op, e.target, e.loc);
    orig.push_back(orig_idx_[i]);
  }
  Trace t = b.finish();
  t.orig_idx_ = std::move(orig);
  return t;
}

std::vector<Violation> validate(const Trace& trace) { return trace.violations(); }

}  // namespace sprace

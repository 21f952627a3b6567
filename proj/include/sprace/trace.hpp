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

#ifndef SPRACE_TRACE_HPP_
#define SPRACE_TRACE_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sprace {

enum class Op : uint8_t { kRead, kWrite, kAcquire, kRelease, kFork, kJoin };

inline bool is_access(Op op) { return op == Op::kRead || op == Op::kWrite; }
inline bool is_sync(Op op) { return !is_access(op); }

const char* op_token(Op op);

// One trace event. `idx` is the 1-based position in the trace; `target` is a
// dense variable/lock/thread id depending on `op`. `loc` is an optional
// source-location id, -1 when absent.
struct Event {
  uint32_t idx = 0;
  uint32_t thread = 0;
  Op op = Op::kRead;
  uint32_t target = 0;
  int32_t loc = -1;
};

// Two accesses conflict when they touch the same variable from different
// threads and at least one writes.
inline bool conflicting(const Event& a, const Event& b) {
  return a.thread != b.thread && is_access(a.op) && is_access(b.op) &&
         a.target == b.target && (a.op == Op::kWrite || b.op == Op::kWrite);
}

struct Violation {
  uint32_t idx;  // offending event, 0 when the trace as a whole is at fault
  std::string rule;
};

// Set of event idxs expected to be downward-closed under thread order.
using EventSet = std::set<uint32_t>;

class Trace;

// Incrementally assembles a trace from named tokens. Thread, lock and
// variable tokens are interned to dense ids in order of first appearance.
class TraceBuilder {
 public:
  TraceBuilder();

  // `target` is a variable (r/w), lock (acq/rel) or thread (fork/join) token.
  void add(const std::string& thread, Op op, const std::string& target,
           int32_t loc = -1);
  void add_raw(uint32_t thread, Op op, uint32_t target, int32_t loc = -1);

  uint32_t intern_thread(const std::string& name);
  uint32_t intern_lock(const std::string& name);
  uint32_t intern_var(const std::string& name);

  Trace finish();

 private:
  friend class Trace;
  struct Intern {
    std::vector<std::string> names;
    // simple linear table; traces rarely have many distinct tokens per kind
    uint32_t get(const std::string& name);
  };
  Intern threads_, locks_, vars_;
  std::vector<Event> events_;
};

// Immutable execution trace plus the derived per-thread/lock/variable
// indexes, acquire/release matching and last-write map that the analyses
// consume. Events are addressed by their 1-based idx throughout.
class Trace {
 public:
  Trace() = default;

  uint32_t size() const { return static_cast<uint32_t>(events_.size()) - 1; }
  bool empty() const { return size() == 0; }
  const Event& event(uint32_t idx) const { return events_[idx]; }
  const std::vector<Event>& events() const { return events_; }  // slot 0 unused

  uint32_t num_threads() const { return static_cast<uint32_t>(thread_names_.size()); }
  uint32_t num_locks() const { return static_cast<uint32_t>(lock_names_.size()); }
  uint32_t num_vars() const { return static_cast<uint32_t>(var_names_.size()); }
  uint32_t num_acquires() const { return num_acquires_; }

  const std::string& thread_name(uint32_t t) const { return thread_names_[t]; }
  const std::string& lock_name(uint32_t l) const { return lock_names_[l]; }
  const std::string& var_name(uint32_t v) const { return var_names_[v]; }

  const std::vector<uint32_t>& thread_events(uint32_t t) const { return by_thread_[t]; }
  const std::vector<uint32_t>& lock_acquires(uint32_t l) const { return acquires_[l]; }
  const std::vector<uint32_t>& var_accesses(uint32_t v) const { return by_var_[v]; }

  // Original position when this trace was derived from another (see the
  // ordered-variable filter); defaults to idx.
  uint32_t orig_idx(uint32_t idx) const { return orig_idx_[idx]; }

  const std::vector<Violation>& violations() const { return violations_; }
  bool well_formed() const { return violations_.empty(); }

  // Matching release of an acquire (and vice versa); absent for unmatched
  // trailing acquires.
  std::optional<uint32_t> match_of(uint32_t idx) const;

  // Latest thread-order predecessor: the previous same-thread event, or the
  // fork event for the first event of a forked thread.
  std::optional<uint32_t> prev_of(uint32_t idx) const;

  // All maximal thread-order predecessors. A join event additionally has the
  // joined thread's last event as a predecessor.
  void to_preds(uint32_t idx, std::vector<uint32_t>& out) const;

  // Last write to the variable of read `idx` before it; absent if none.
  std::optional<uint32_t> last_write(uint32_t idx) const;

  // Locks held at an event, including at the acquire/release boundary events
  // of the critical section itself.
  std::set<uint32_t> locks_held(uint32_t idx) const;

  // True iff `idx` is outside `s` and all its thread-order predecessors are
  // inside.
  bool enabled(const EventSet& s, uint32_t idx) const;

  bool to_leq(uint32_t a, uint32_t b) const;  // a <=TO b (reflexive)

  Trace filtered_copy(const std::vector<bool>& keep_event) const;

 private:
  friend class TraceBuilder;
  void build_derived();

  std::vector<Event> events_;  // events_[0] is a sentinel
  std::vector<std::string> thread_names_, lock_names_, var_names_;
  std::vector<std::vector<uint32_t>> by_thread_, acquires_, by_var_;
  std::vector<uint32_t> match_;     // 0 = none
  std::vector<uint32_t> lw_;        // 0 = none, reads only
  std::vector<uint32_t> prev_;      // 0 = none
  std::vector<uint32_t> join_src_;  // joined thread's last event, joins only
  std::vector<uint32_t> orig_idx_;
  std::vector<uint32_t> pos_in_thread_;  // 1-based position within own thread
  std::vector<Violation> violations_;
  uint32_t num_acquires_ = 0;
};

// Empty iff every trace invariant holds; violations name the offending event
// and rule.
std::vector<Violation> validate(const Trace& trace);

}  // namespace sprace

#endif  // SPRACE_TRACE_HPP_

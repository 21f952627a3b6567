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

#include "sprace/oracle_bf.hpp"

#include <algorithm>
#include <cassert>
#include <unordered_set>

namespace sprace {

namespace {

// Incremental state of a partially built reordering. All rules are checked
// at append time, so every reachable node is a correct reordering prefix.
struct SearchState {
  const Trace& trace;
  bool sync_preserving;
  std::vector<bool> chosen;
  std::vector<uint32_t> seq;
  std::vector<uint32_t> last_write;   // per var, 0 = none
  std::vector<uint32_t> holder_acq;   // per lock, acquire idx or 0
  std::vector<uint32_t> max_acq_idx;  // per lock, max chosen acquire idx

  explicit SearchState(const Trace& t, bool sync_p)
      : trace(t),
        sync_preserving(sync_p),
        chosen(t.size() + 1, false),
        last_write(t.num_vars(), 0),
        holder_acq(t.num_locks(), 0),
        max_acq_idx(t.num_locks(), 0) {}

  bool to_enabled(uint32_t e) const {
    if (chosen[e]) return false;
    std::vector<uint32_t> preds;
    trace.to_preds(e, preds);
    for (uint32_t p : preds)
      if (!chosen[p]) return false;
    return true;
  }

  bool may_append(uint32_t e) const {
    const Event& ev = trace.event(e);
    switch (ev.op) {
      case Op::kRead: {
        uint32_t lw = trace.last_write(e).value_or(0);
        return last_write[ev.target] == lw;
      }
      case Op::kAcquire:
        if (holder_acq[ev.target] != 0) return false;
        if (sync_preserving && e < max_acq_idx[ev.target]) return false;
        return true;
      case Op::kRelease: {
        auto m = trace.match_of(e);
        return m && holder_acq[ev.target] == *m;
      }
      default:
        return true;
    }
  }

  // returns undo info: previous last_write for writes
  uint32_t append(uint32_t e) {
    const Event& ev = trace.event(e);
    chosen[e] = true;
    seq.push_back(e);
    uint32_t undo = 0;
    switch (ev.op) {
      case Op::kWrite:
        undo = last_write[ev.target];
        last_write[ev.target] = e;
        break;
      case Op::kAcquire:
        holder_acq[ev.target] = e;
        undo = max_acq_idx[ev.target];
        max_acq_idx[ev.target] = std::max(max_acq_idx[ev.target], e);
        break;
      case Op::kRelease:
        holder_acq[ev.target] = 0;
        break;
      default:
        break;
    }
    return undo;
  }

  void unappend(uint32_t e, uint32_t undo) {
    const Event& ev = trace.event(e);
    chosen[e] = false;
    seq.pop_back();
    switch (ev.op) {
      case Op::kWrite:
        last_write[ev.target] = undo;
        break;
      case Op::kAcquire:
        holder_acq[ev.target] = 0;
        max_acq_idx[ev.target] = undo;
        break;
      case Op::kRelease:
        holder_acq[ev.target] = trace.match_of(e).value_or(0);
        break;
      default:
        break;
    }
  }
};

void enumerate_rec(SearchState& st, const std::vector<uint32_t>& universe,
                   const std::function<void(const std::vector<uint32_t>&)>& yield) {
  yield(st.seq);
  for (uint32_t e : universe) {
    if (!st.to_enabled(e) || !st.may_append(e)) continue;
    uint32_t undo = st.append(e);
    enumerate_rec(st, universe, yield);
    st.unappend(e, undo);
  }
}

// Memoized reachability: can the required set be fully chosen?
//
// Two space savers keep the blowup of reduction-sized traces in check.
// Satisfied reads, releases, forks and joins never change the per-variable
// or lock state, so committing one neither removes nor adds completions:
// any completion that schedules it later can schedule it first, and any
// completion without it stays valid with it prepended. They are therefore
// committed greedily and only writes and acquires branch. Second, the
// caller restricts the universe to the need-closure of the required set, so
// provably removable events are never explored.
struct PairSearch {
  SearchState st;
  const std::vector<uint32_t>& universe;
  const std::vector<bool>& required;
  uint32_t missing_required;
  uint64_t nodes = 0;
  uint64_t max_nodes;
  std::unordered_set<std::string> seen;

  PairSearch(const Trace& t, bool sync_p, const std::vector<uint32_t>& uni,
             const std::vector<bool>& req, uint32_t req_count, uint64_t budget)
      : st(t, sync_p),
        universe(uni),
        required(req),
        missing_required(req_count),
        max_nodes(budget) {}

  std::string key() const {
    std::string k;
    k.reserve((st.chosen.size() + 7) / 8 + st.last_write.size() * 4);
    uint8_t acc = 0;
    int bits = 0;
    for (bool b : st.chosen) {
      acc = static_cast<uint8_t>((acc << 1) | (b ? 1 : 0));
      if (++bits == 8) {
        k.push_back(static_cast<char>(acc));
        acc = 0;
        bits = 0;
      }
    }
    if (bits) k.push_back(static_cast<char>(acc << (8 - bits)));
    for (uint32_t w : st.last_write) {
      k.push_back(static_cast<char>(w & 0xff));
      k.push_back(static_cast<char>((w >> 8) & 0xff));
      k.push_back(static_cast<char>((w >> 16) & 0xff));
      k.push_back(static_cast<char>((w >> 24) & 0xff));
    }
    return k;
  }

  bool commits_branch_point(uint32_t e) const {
    Op op = st.trace.event(e).op;
    return op == Op::kWrite || op == Op::kAcquire;
  }

  void push(uint32_t e, std::vector<std::pair<uint32_t, uint32_t>>& log) {
    uint32_t undo = st.append(e);
    log.emplace_back(e, undo);
    if (required[e]) --missing_required;
  }

  void unwind(std::vector<std::pair<uint32_t, uint32_t>>& log) {
    while (!log.empty()) {
      auto [e, undo] = log.back();
      log.pop_back();
      if (required[e]) ++missing_required;
      st.unappend(e, undo);
    }
  }

  bool run() {
    std::vector<std::pair<uint32_t, uint32_t>> commits;
    for (;;) {
      if (missing_required == 0) return true;
      bool committed = false;
      for (uint32_t e : universe) {
        if (commits_branch_point(e)) continue;
        if (!st.to_enabled(e) || !st.may_append(e)) continue;
        push(e, commits);
        committed = true;
        break;
      }
      if (!committed) break;
    }
    if (++nodes > max_nodes)
      throw SizeCapError("oracle search node budget exhausted");
    if (seen.insert(key()).second) {
      for (uint32_t e : universe) {
        if (!commits_branch_point(e)) continue;
        if (!st.to_enabled(e) || !st.may_append(e)) continue;
        std::vector<std::pair<uint32_t, uint32_t>> branch;
        push(e, branch);
        if (run()) return true;
        unwind(branch);
      }
    }
    unwind(commits);
    return false;
  }
};

// Events that may appear in a witness for (e1, e2): everything that is not a
// thread-order successor (reflexive) of either event.
std::vector<uint32_t> pair_universe(const Trace& trace, uint32_t e1, uint32_t e2) {
  std::vector<bool> excluded(trace.size() + 1, false);
  std::vector<uint32_t> preds;
  for (uint32_t i = 1; i <= trace.size(); ++i) {
    if (i == e1 || i == e2) {
      excluded[i] = true;
      continue;
    }
    trace.to_preds(i, preds);
    for (uint32_t p : preds)
      if (excluded[p]) excluded[i] = true;
  }
  std::vector<uint32_t> uni;
  for (uint32_t i = 1; i <= trace.size(); ++i)
    if (!excluded[i]) uni.push_back(i);
  return uni;
}

bool race_bf_impl(const Trace& trace, uint32_t e1, uint32_t e2, bool sync_preserving,
                  const BfLimits& limits) {
  // non-conflicting pairs (same thread, two reads, different variables) are
  // trivially not races
  if (!conflicting(trace.event(e1), trace.event(e2))) return false;

  std::vector<uint32_t> uni = pair_universe(trace, e1, e2);
  if (uni.size() > limits.max_events)
    throw SizeCapError("pair universe of " + std::to_string(uni.size()) +
                       " events exceeds cap " + std::to_string(limits.max_events));

  std::vector<bool> in_uni(trace.size() + 1, false);
  for (uint32_t e : uni) in_uni[e] = true;

  // both events must end up enabled: their thread-order ancestors are
  // required, as are the observed writes of required reads, recursively
  std::vector<bool> required(trace.size() + 1, false);
  uint32_t req_count = 0;
  std::vector<uint32_t> stack, preds;
  trace.to_preds(e1, stack);
  trace.to_preds(e2, preds);
  stack.insert(stack.end(), preds.begin(), preds.end());
  for (uint32_t w : stack) required[w] = true;
  req_count = static_cast<uint32_t>(std::count(required.begin(), required.end(), true));
  while (!stack.empty()) {
    uint32_t e = stack.back();
    stack.pop_back();
    if (!in_uni[e]) return false;  // a requirement follows one of the events
    auto need = [&](uint32_t p) {
      if (!required[p]) {
        required[p] = true;
        ++req_count;
        stack.push_back(p);
      }
    };
    trace.to_preds(e, preds);
    for (uint32_t p : preds) need(p);
    if (trace.event(e).op == Op::kRead)
      if (auto w = trace.last_write(e)) need(*w);
  }

  // search only the need-closure: events reachable from the requirements
  // through predecessors, observed writes, and in-universe matching
  // releases. A witness cut down to this set is still a witness.
  std::vector<bool> in_need(trace.size() + 1, false);
  for (uint32_t e = 1; e <= trace.size(); ++e)
    if (required[e]) {
      in_need[e] = true;
      stack.push_back(e);
    }
  while (!stack.empty()) {
    uint32_t e = stack.back();
    stack.pop_back();
    auto reach = [&](uint32_t p) {
      if (in_uni[p] && !in_need[p]) {
        in_need[p] = true;
        stack.push_back(p);
      }
    };
    trace.to_preds(e, preds);
    for (uint32_t p : preds) reach(p);
    if (trace.event(e).op == Op::kRead)
      if (auto w = trace.last_write(e)) reach(*w);
    if (trace.event(e).op == Op::kAcquire)
      if (auto m = trace.match_of(e)) reach(*m);
  }
  std::vector<uint32_t> need_uni;
  for (uint32_t e : uni)
    if (in_need[e]) need_uni.push_back(e);

  PairSearch search(trace, sync_preserving, need_uni, required, req_count,
                    limits.max_nodes);
  return search.run();
}

}  // namespace

bool is_correct_reordering(const Trace& trace, const std::vector<uint32_t>& seq) {
  SearchState st(trace, false);
  for (uint32_t e : seq) {
    if (e == 0 || e > trace.size()) return false;
    if (!st.to_enabled(e) || !st.may_append(e)) return false;
    st.append(e);
  }
  return true;
}

bool is_sync_preserving_reordering(const Trace& trace, const std::vector<uint32_t>& seq) {
  SearchState st(trace, true);
  for (uint32_t e : seq) {
    if (e == 0 || e > trace.size()) return false;
    if (!st.to_enabled(e) || !st.may_append(e)) return false;
    st.append(e);
  }
  return true;
}

void enumerate_correct_reorderings(
    const Trace& trace, uint32_t max_events,
    const std::function<void(const std::vector<uint32_t>&)>& yield) {
  if (max_events > 20)
    throw SizeCapError("enumeration cap cannot exceed 20 events");
  if (trace.size() > max_events)
    throw SizeCapError("trace of " + std::to_string(trace.size()) +
                       " events exceeds cap " + std::to_string(max_events));
  std::vector<uint32_t> universe;
  for (uint32_t i = 1; i <= trace.size(); ++i) universe.push_back(i);
  SearchState st(trace, false);
  enumerate_rec(st, universe, yield);
}

bool is_predictable_race_bf(const Trace& trace, uint32_t e1, uint32_t e2,
                            const BfLimits& limits) {
  return race_bf_impl(trace, e1, e2, false, limits);
}

bool is_syncp_race_bf(const Trace& trace, uint32_t e1, uint32_t e2,
                      const BfLimits& limits) {
  return race_bf_impl(trace, e1, e2, true, limits);
}

std::vector<std::pair<uint32_t, uint32_t>> syncp_races_bf(const Trace& trace,
                                                          const BfLimits& limits) {
  std::vector<std::pair<uint32_t, uint32_t>> out;
  for (uint32_t e2 = 1; e2 <= trace.size(); ++e2) {
    if (!is_access(trace.event(e2).op)) continue;
    for (uint32_t e1 = 1; e1 < e2; ++e1) {
      if (!conflicting(trace.event(e1), trace.event(e2))) continue;
      if (is_syncp_race_bf(trace, e1, e2, limits)) {
        out.emplace_back(e1, e2);
        break;
      }
    }
  }
  return out;
}

}  // namespace sprace

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

#include "sprace/closure_ref.hpp"

#include <cassert>
#include <stdexcept>

namespace sprace {

namespace {

// Saturates `in_set` under thread order and last-write edges starting from
// the events on `work`.
void tl_saturate(const Trace& trace, std::vector<bool>& in_set,
                 std::vector<uint32_t>& work) {
  std::vector<uint32_t> preds;
  while (!work.empty()) {
    uint32_t e = work.back();
    work.pop_back();
    trace.to_preds(e, preds);
    for (uint32_t p : preds) {
      if (!in_set[p]) {
        in_set[p] = true;
        work.push_back(p);
      }
    }
    if (trace.event(e).op == Op::kRead) {
      if (auto w = trace.last_write(e); w && !in_set[*w]) {
        in_set[*w] = true;
        work.push_back(*w);
      }
    }
  }
}

std::vector<bool> seed(const Trace& trace, const EventSet& s) {
  std::vector<bool> in_set(trace.size() + 1, false);
  for (uint32_t e : s) {
    if (e == 0 || e > trace.size()) throw std::out_of_range("event idx out of range");
    in_set[e] = true;
  }
  return in_set;
}

EventSet collect(const std::vector<bool>& in_set) {
  EventSet out;
  for (uint32_t i = 1; i < in_set.size(); ++i)
    if (in_set[i]) out.insert(i);
  return out;
}

void sp_saturate(const Trace& trace, std::vector<bool>& in_set,
                 std::vector<uint32_t>& work) {
  for (;;) {
    tl_saturate(trace, in_set, work);
    bool changed = false;
    for (uint32_t l = 0; l < trace.num_locks(); ++l) {
      const auto& acqs = trace.lock_acquires(l);
      // find the last acquire on l in the set; all earlier ones in the set
      // must have their releases added
      int last = -1;
      for (int i = static_cast<int>(acqs.size()) - 1; i >= 0; --i) {
        if (in_set[acqs[i]]) {
          last = i;
          break;
        }
      }
      for (int i = 0; i < last; ++i) {
        if (!in_set[acqs[i]]) continue;
        auto m = trace.match_of(acqs[i]);
        assert(m.has_value());  // a later acquire exists, so this one matched
        if (!in_set[*m]) {
          in_set[*m] = true;
          work.push_back(*m);
          changed = true;
        }
      }
    }
    if (!changed) return;
  }
}

}  // namespace

EventSet tl_closure(const Trace& trace, const EventSet& s) {
  std::vector<bool> in_set = seed(trace, s);
  std::vector<uint32_t> work(s.begin(), s.end());
  tl_saturate(trace, in_set, work);
  return collect(in_set);
}

EventSet sp_closure(const Trace& trace, const EventSet& s) {
  std::vector<bool> in_set = seed(trace, s);
  std::vector<uint32_t> work(s.begin(), s.end());
  sp_saturate(trace, in_set, work);
  return collect(in_set);
}

EventSet sp_ideal(const Trace& trace, uint32_t e1, uint32_t e2) {
  EventSet s;
  std::vector<uint32_t> preds;
  trace.to_preds(e1, preds);
  s.insert(preds.begin(), preds.end());
  trace.to_preds(e2, preds);
  s.insert(preds.begin(), preds.end());
  return sp_closure(trace, s);
}

bool is_syncp_race_pair(const Trace& trace, uint32_t e1, uint32_t e2) {
  if (!conflicting(trace.event(e1), trace.event(e2)))
    throw std::invalid_argument("is_syncp_race_pair requires a conflicting pair");
  if (e1 >= e2) throw std::invalid_argument("is_syncp_race_pair requires e1 before e2");
  EventSet ideal = sp_ideal(trace, e1, e2);
  assert(!ideal.count(e2));
  return !ideal.count(e1);
}

std::optional<uint32_t> syncp_races_with_thread(const Trace& trace, uint32_t e,
                                                uint32_t t) {
  const Event& ev = trace.event(e);
  assert(is_access(ev.op));
  assert(t != ev.thread);

  std::vector<uint32_t> base_preds;
  trace.to_preds(e, base_preds);

  std::optional<uint32_t> best;
  for (Op kind : {Op::kRead, Op::kWrite}) {
    if (kind == Op::kRead && ev.op == Op::kRead) continue;  // two reads never race
    std::vector<bool> in_set(trace.size() + 1, false);
    std::vector<uint32_t> work;
    for (uint32_t p : base_preds) {
      if (!in_set[p]) {
        in_set[p] = true;
        work.push_back(p);
      }
    }
    sp_saturate(trace, in_set, work);
    for (uint32_t cand : trace.var_accesses(ev.target)) {
      if (cand >= e) break;
      const Event& ce = trace.event(cand);
      if (ce.thread != t || ce.op != kind) continue;
      std::vector<uint32_t> preds;
      trace.to_preds(cand, preds);
      for (uint32_t p : preds) {
        if (!in_set[p]) {
          in_set[p] = true;
          work.push_back(p);
        }
      }
      sp_saturate(trace, in_set, work);
      if (!in_set[cand]) {
        if (!best || cand < *best) best = cand;
        break;
      }
    }
  }
  return best;
}

std::vector<std::pair<uint32_t, uint32_t>> syncp_races_ref(const Trace& trace) {
  std::vector<std::pair<uint32_t, uint32_t>> out;
  for (uint32_t e2 = 1; e2 <= trace.size(); ++e2) {
    if (!is_access(trace.event(e2).op)) continue;
    std::optional<uint32_t> best;
    for (uint32_t t = 0; t < trace.num_threads(); ++t) {
      if (t == trace.event(e2).thread) continue;
      auto r = syncp_races_with_thread(trace, e2, t);
      if (r && (!best || *r < *best)) best = *r;
    }
    if (best) out.emplace_back(*best, e2);
  }
  return out;
}

}  // namespace sprace

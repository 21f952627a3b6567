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

#include <random>

#include <doctest.h>

#include "sprace/closure_ref.hpp"
#include "sprace/generators.hpp"
#include "sprace/oracle_bf.hpp"
#include "sprace/trace_io.hpp"
#include "test_util.hpp"

using namespace sprace;
using sprace::testing::fixture;
using sprace::testing::from_text;

namespace {

std::vector<std::pair<uint32_t, uint32_t>> pairs_of(const std::vector<RaceReport>& rs) {
  std::vector<std::pair<uint32_t, uint32_t>> out;
  for (const RaceReport& r : rs) out.emplace_back(r.e1, r.e2);
  return out;
}

}  // namespace

TEST_CASE("sigma2: the distant pair is found at e6") {
  auto rs = run_syncp(fixture("sigma2.trace"));
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].e1 == 1);
  CHECK(rs[0].e2 == 6);
  CHECK(rs[0].k1 == Op::kWrite);
  CHECK(rs[0].k2 == Op::kWrite);
  CHECK(rs[0].t1 != rs[0].t2);
}

TEST_CASE("sigma1: the intermediate protected write does not mask the race") {
  auto rs = run_syncp(fixture("sigma1.trace"));
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].e1 == 1);
  CHECK(rs[0].e2 == 6);
}

TEST_CASE("sigma4: both later accesses race with the first write") {
  auto rs = run_syncp(fixture("sigma4.trace"));
  CHECK(pairs_of(rs) ==
        std::vector<std::pair<uint32_t, uint32_t>>{{1, 5}, {1, 8}});
}

TEST_CASE("single-thread trace never reports") {
  auto rs = run_syncp(from_text("t1|w|x\nt1|r|x\nt1|acq|l\nt1|w|x\nt1|rel|l\n"));
  CHECK(rs.empty());
}

TEST_CASE("section queues after sigma2's sync prefix") {
  SyncPDetector d(2, 1, 1);
  d.on_write(0, 0, 1, -1);
  d.on_acquire(0, 0, 2);
  d.on_release(0, 0, 3);
  d.on_acquire(1, 0, 4);
  d.on_release(1, 0, 5);
  auto q0 = d.cs_entries(0, 0);
  auto q1 = d.cs_entries(1, 0);
  REQUIRE(q0.size() == 1);
  REQUIRE(q1.size() == 1);
  CHECK(q0[0] == std::pair<uint64_t, bool>{1, true});
  CHECK(q1[0] == std::pair<uint64_t, bool>{2, true});

  // acq/rel pair leaves one completed entry; a trailing acquire stays open
  d.on_acquire(0, 0, 6);
  auto q2 = d.cs_entries(0, 0);
  REQUIRE(q2.size() == 2);
  CHECK(q2[1] == std::pair<uint64_t, bool>{3, false});
}

TEST_CASE("fork and join edges order accesses") {
  // parent write before fork is ordered into the child
  CHECK(run_syncp(from_text("t1|w|x\nt1|fork|t2\nt2|r|x\n")).empty());
  // fork alone does not order the parent's later accesses against the child
  auto rs = run_syncp(from_text("t1|fork|t2\nt2|w|x\nt1|w|x\n"));
  CHECK(pairs_of(rs) == std::vector<std::pair<uint32_t, uint32_t>>{{2, 3}});
  // join orders the child's accesses before the parent's tail
  CHECK(run_syncp(from_text("t1|fork|t2\nt2|w|x\nt1|join|t2\nt1|w|x\n")).empty());
}

TEST_CASE("one earlier event can race with several later ones") {
  // reported racy entries stay pending, so e1 pairs with both writes of t2
  auto rs = run_syncp(from_text("t1|w|x\nt2|w|x\nt2|w|x\n"));
  CHECK(pairs_of(rs) ==
        std::vector<std::pair<uint32_t, uint32_t>>{{1, 2}, {1, 3}});
}

TEST_CASE("timestamps count the thread-order+last-write closure per thread") {
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    Trace t = gen_random(sprace::testing::small_config(seed));
    auto [reports, ts] = run_syncp_timestamps(t);
    for (uint32_t e = 1; e <= t.size(); ++e) {
      EventSet cl = tl_closure(t, {e});
      std::vector<uint64_t> count(t.num_threads(), 0);
      for (uint32_t f : cl) ++count[t.event(f).thread];
      for (uint32_t th = 0; th < t.num_threads(); ++th) CHECK(ts[e][th] == count[th]);
      // containment in the closure is exactly timestamp order
      for (uint32_t f = 1; f <= t.size(); ++f)
        CHECK(ts[f].leq(ts[e]) == (tl_closure(t, {e}).count(f) == 1));
    }
  }
}

TEST_CASE("engine agrees with the closure reference and the enumeration oracle") {
  for (uint64_t seed = 1; seed <= 200; ++seed) {
    Trace t = gen_random(sprace::testing::small_config(seed));
    auto engine = pairs_of(run_syncp(t));
    auto ref = syncp_races_ref(t);
    CHECK(engine == ref);
    if (engine != ref) {
      MESSAGE("seed ", seed, ":\n", emit_trace(t));
      break;
    }
  }
}

TEST_CASE("engine agrees with the references on forking traces") {
  // the library generator never forks, so build small fork/join shapes here
  std::mt19937_64 rng(31337);
  for (int iter = 0; iter < 200; ++iter) {
    TraceBuilder b;
    uint32_t nt = 3;
    for (uint32_t i = 0; i < nt; ++i) b.intern_thread("t" + std::to_string(i + 1));
    for (uint32_t v = 0; v < 2; ++v) b.intern_var("x" + std::to_string(v + 1));
    b.intern_lock("l");
    std::vector<int> state(nt, 0);  // 0 unborn (forkable), 1 live, 2 joined
    state[0] = 1;
    std::vector<bool> holds(nt, false);
    bool lock_free = true;
    for (int step = 0; step < 14; ++step) {
      std::vector<uint32_t> live;
      for (uint32_t i = 0; i < nt; ++i)
        if (state[i] == 1) live.push_back(i);
      if (live.empty()) break;
      uint32_t t = live[rng() % live.size()];
      switch (rng() % 6) {
        case 0:
          b.add_raw(t, Op::kRead, static_cast<uint32_t>(rng() % 2));
          break;
        case 1:
          b.add_raw(t, Op::kWrite, static_cast<uint32_t>(rng() % 2));
          break;
        case 2:
          if (holds[t]) {
            b.add_raw(t, Op::kRelease, 0);
            holds[t] = false;
            lock_free = true;
          } else if (lock_free) {
            b.add_raw(t, Op::kAcquire, 0);
            holds[t] = true;
            lock_free = false;
          }
          break;
        case 3: {
          std::vector<uint32_t> unborn;
          for (uint32_t i = 0; i < nt; ++i)
            if (state[i] == 0) unborn.push_back(i);
          if (!unborn.empty()) {
            uint32_t child = unborn[rng() % unborn.size()];
            b.add_raw(t, Op::kFork, child);
            state[child] = 1;
          }
          break;
        }
        default: {
          std::vector<uint32_t> joinable;
          for (uint32_t i = 0; i < nt; ++i)
            if (state[i] == 1 && i != t && !holds[i]) joinable.push_back(i);
          // join targets must be quiescent; retiring them here keeps the
          // trace well-formed without modeling exits
          if (!joinable.empty() && rng() % 2 == 0) {
            uint32_t child = joinable[rng() % joinable.size()];
            b.add_raw(t, Op::kJoin, child);
            state[child] = 2;
          }
          break;
        }
      }
    }
    Trace t = b.finish();
    REQUIRE(validate(t).empty());
    CHECK(pairs_of(run_syncp(t)) == syncp_races_ref(t));
    CHECK(pairs_of(run_syncp(t)) == syncp_races_bf(t));
  }
}

TEST_CASE("deterministic reports") {
  Trace t = gen_random(sprace::testing::small_config(99, 200, 4, 2, 3));
  auto a = pairs_of(run_syncp(t));
  auto b = pairs_of(run_syncp(t));
  CHECK(a == b);
}

TEST_CASE("section scan consumes contained entries and stops at the frontier") {
  // e7's candidate write precedes both critical sections, so its closure
  // pass runs over an ideal containing neither acquire: nothing consumed.
  // e8's candidate follows both, the scan advances past the two contained
  // sections and keeps the later one as the per-thread result; with no other
  // thread on the lock there is nothing to join and both races stand.
  SyncPOptions opts;
  opts.collect_stats = true;
  Trace t = from_text(
      "t1|w|x\nt1|acq|l\nt1|rel|l\nt1|acq|l\nt1|rel|l\nt1|w|y\n"
      "t2|r|x\nt2|r|y\n");
  SyncPDetector d(t.num_threads(), t.num_locks(), t.num_vars(), opts);
  for (uint32_t i = 1; i <= 7; ++i)
    d.on_event(t.event(i).op, t.event(i).thread, t.event(i).target, i, -1);
  CHECK(d.stats().cs_consumed == 0);
  d.on_event(t.event(8).op, t.event(8).thread, t.event(8).target, 8, -1);
  CHECK(d.stats().cs_consumed == 2);
  auto rs = d.take_reports();
  CHECK(pairs_of(rs) ==
        std::vector<std::pair<uint32_t, uint32_t>>{{1, 7}, {6, 8}});
}

TEST_CASE("a consumed section still supplies its release to later closure rounds") {
  // at e6 the ideal contains only t1's section, which is consumed as the
  // lock's latest; at e11 t3's later section enters the ideal, so t1's
  // release must now be joined even though its entry was consumed, putting
  // the protected write inside the ideal and dismissing (3,11)
  Trace t = from_text(
      "t1|w|a\nt1|acq|l\nt1|w|x\nt1|rel|l\n"
      "t2|r|a\nt2|w|x\n"
      "t3|acq|l\nt3|w|b\nt3|rel|l\n"
      "t2|r|b\nt2|w|x\n");
  CHECK(pairs_of(run_syncp(t)) ==
        std::vector<std::pair<uint32_t, uint32_t>>{{1, 5}, {3, 6}, {8, 10}});
  CHECK_FALSE(is_syncp_race_pair(t, 3, 11));
}

TEST_CASE("shared queue entries are appended once per access and consumed boundedly") {
  SyncPOptions opts;
  opts.collect_stats = true;
  Trace t = gen_random(sprace::testing::small_config(5, 400, 3, 2, 2));
  SyncPDetector d(t.num_threads(), t.num_locks(), t.num_vars(), opts);
  uint64_t accesses = 0, acquires = 0;
  for (uint32_t i = 1; i <= t.size(); ++i) {
    const Event& e = t.event(i);
    if (is_access(e.op)) ++accesses;
    if (e.op == Op::kAcquire) ++acquires;
    d.on_event(e.op, e.thread, e.target, i, e.loc);
  }
  const SyncPStats& s = d.stats();
  CHECK(s.access_entries == accesses);
  CHECK(s.cs_entries == acquires);
  uint64_t tm1 = t.num_threads() - 1;
  // each entry is consumed at most once per consumer view
  CHECK(s.access_consumed <= s.access_entries * 2 * tm1);
  CHECK(s.cs_consumed <=
        s.cs_entries * 3 * tm1 * t.num_threads() * t.num_vars());
}

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

#include <doctest.h>

#include "sprace/closure_ref.hpp"
#include "sprace/generators.hpp"
#include "sprace/syncp.hpp"
#include "sprace/trace_io.hpp"
#include "test_util.hpp"

using namespace sprace;
using sprace::testing::fixture;
using sprace::testing::from_text;

TEST_CASE("single-thread trace: everything filtered") {
  Trace t = from_text("t1|w|x\nt1|r|x\nt1|w|y\n");
  FilterResult fr = filter_ordered_variables(t);
  CHECK(fr.total_dropped == 3);
  CHECK(fr.trace.size() == 0);
  CHECK(fr.dropped_var == std::vector<bool>{true, true});
}

TEST_CASE("sigma2: x survives") {
  FilterResult fr = filter_ordered_variables(fixture("sigma2.trace"));
  CHECK(fr.total_dropped == 0);
  CHECK(fr.trace.size() == 6);
}

TEST_CASE("sigmaC: lock-protected orderings are invisible, both variables survive") {
  // x's only ordering is the lw edge into the read itself, which does not
  // excuse the pair; dropping it would erase the edge and fabricate a race
  // on y in the filtered trace
  Trace t = fixture("sigmaC.trace");
  FilterResult fr = filter_ordered_variables(t);
  CHECK(fr.total_dropped == 0);
  CHECK(run_syncp(fr.trace).empty());
}

TEST_CASE("a read-mediated path to the predecessor orders later accesses") {
  // (1,2) stays unordered (and is a real race); (1,3) is ordered through
  // the read, so the variable survives because of the first pair alone
  Trace t = from_text("t1|w|x\nt2|r|x\nt2|w|x\n");
  FilterResult fr = filter_ordered_variables(t);
  CHECK(fr.total_dropped == 0);
  // make the first pair fork-ordered and the variable drops
  Trace u = from_text("t1|w|x\nt1|fork|t2\nt2|r|x\nt2|w|x\n");
  FilterResult fu = filter_ordered_variables(u);
  CHECK(fu.total_dropped == 3);
  CHECK(fu.trace.size() == 1);
}

TEST_CASE("survivors keep their original positions for reporting") {
  Trace t = from_text("t1|w|a\nt1|r|a\nt1|w|x\nt2|r|x\nt2|w|y\n");
  FilterResult fr = filter_ordered_variables(t);
  // a is thread-local and y has no conflicting access; only x survives
  REQUIRE(fr.trace.size() == 2);
  CHECK(fr.trace.orig_idx(1) == 3);
  CHECK(fr.trace.orig_idx(2) == 4);
  auto rs = run_syncp(fr.trace);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].e1 == 3);
  CHECK(rs[0].e2 == 4);
}

TEST_CASE("sync events always survive") {
  Trace t = from_text("t1|acq|l\nt1|w|x\nt1|rel|l\n");
  FilterResult fr = filter_ordered_variables(t);
  CHECK(fr.trace.size() == 2);
  CHECK(fr.trace.event(1).op == Op::kAcquire);
  CHECK(fr.trace.event(2).op == Op::kRelease);
}

TEST_CASE("filtering is idempotent") {
  for (uint64_t seed = 1; seed <= 60; ++seed) {
    Trace t = gen_random(sprace::testing::small_config(seed, 40, 3, 2, 4));
    FilterResult once = filter_ordered_variables(t);
    FilterResult twice = filter_ordered_variables(once.trace);
    CHECK(twice.total_dropped == 0);
    CHECK(emit_trace(twice.trace) == emit_trace(once.trace));
  }
}

TEST_CASE("filtered variables have no sync-preserving race") {
  for (uint64_t seed = 1; seed <= 80; ++seed) {
    Trace t = gen_random(sprace::testing::small_config(seed));
    FilterResult fr = filter_ordered_variables(t);
    for (uint32_t e1 = 1; e1 <= t.size(); ++e1) {
      for (uint32_t e2 = e1 + 1; e2 <= t.size(); ++e2) {
        if (!conflicting(t.event(e1), t.event(e2))) continue;
        if (!fr.dropped_var[t.event(e1).target]) continue;
        CHECK_FALSE(is_syncp_race_pair(t, e1, e2));
      }
    }
  }
}

TEST_CASE("fork/join edges participate in the filter order") {
  Trace t = from_text("t1|w|x\nt1|fork|t2\nt2|r|x\nt2|w|x\nt1|join|t2\nt1|r|x\n");
  FilterResult fr = filter_ordered_variables(t);
  CHECK(fr.dropped_var[0]);
  CHECK(fr.trace.size() == 2);  // only fork and join remain
}

TEST_CASE("detection on the filtered trace reports original indexes") {
  Trace t = from_text(
      "t1|w|a\nt1|r|a\n"   // thread-local var, dropped
      "t1|w|x\nt2|w|x\n"); // the live race
  FilterResult fr = filter_ordered_variables(t);
  REQUIRE(fr.trace.size() == 2);
  auto rs = run_syncp(fr.trace);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].e1 == 3);
  CHECK(rs[0].e2 == 4);
}

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

#include <set>

#include <doctest.h>

#include "sprace/generators.hpp"
#include "test_util.hpp"

using namespace sprace;
using sprace::testing::fixture;
using sprace::testing::from_text;

TEST_CASE("enumeration of a single-event trace") {
  Trace t = from_text("t1|w|x\n");
  std::set<std::vector<uint32_t>> seqs;
  enumerate_correct_reorderings(t, 14, [&](const std::vector<uint32_t>& s) {
    CHECK(seqs.insert(s).second);  // exactly once
  });
  CHECK(seqs == std::set<std::vector<uint32_t>>{{}, {1}});
}

TEST_CASE("enumeration of two independent single-event threads") {
  Trace t = from_text("t1|w|x\nt2|w|y\n");
  std::set<std::vector<uint32_t>> seqs;
  enumerate_correct_reorderings(t, 14,
                                [&](const std::vector<uint32_t>& s) { seqs.insert(s); });
  std::set<std::vector<uint32_t>> want{{}, {1}, {2}, {1, 2}, {2, 1}};
  CHECK(seqs == want);
}

TEST_CASE("enumeration includes the reversal witness of sigma5") {
  Trace t = fixture("sigma5.trace");
  bool found = false;
  uint64_t count = 0;
  enumerate_correct_reorderings(t, 14, [&](const std::vector<uint32_t>& s) {
    ++count;
    CHECK(is_correct_reordering(t, s));  // self-check every yield
    if (s == std::vector<uint32_t>{4, 5, 1, 2, 6}) found = true;
  });
  CHECK(found);
  CHECK(count > 5);
}

TEST_CASE("size caps are loud") {
  GenConfig cfg = sprace::testing::small_config(1, 21);
  Trace t = gen_random(cfg);
  CHECK_THROWS_AS(enumerate_correct_reorderings(t, 14, [](const auto&) {}), SizeCapError);
  CHECK_THROWS_AS(enumerate_correct_reorderings(t, 25, [](const auto&) {}), SizeCapError);
}

TEST_CASE("predictable-race queries on the figure traces") {
  Trace sb = fixture("sigmaB.trace");
  CHECK(is_predictable_race_bf(sb, 1, 6));
  CHECK_FALSE(is_predictable_race_bf(sb, 3, 6));
  Trace s6 = fixture("sigma6.trace");
  CHECK(is_predictable_race_bf(s6, 2, 7));
  CHECK_FALSE(is_predictable_race_bf(s6, 2, 5));
  // the unsound-order counterexample has no predictable race at all
  Trace sdp = fixture("sdp.trace");
  BfLimits wide;
  wide.max_events = 20;
  CHECK_FALSE(is_predictable_race_bf(sdp, 9, 20, wide));
  CHECK_FALSE(is_predictable_race_bf(sdp, 4, 12, wide));
  CHECK_FALSE(is_predictable_race_bf(sdp, 4, 18, wide));
}

TEST_CASE("sync-preserving queries on the figure traces") {
  Trace s5 = fixture("sigma5.trace");
  CHECK(is_predictable_race_bf(s5, 2, 6));
  CHECK_FALSE(is_syncp_race_bf(s5, 2, 6));  // needs a section reversal
  Trace s3 = fixture("sigma3.trace");
  CHECK(is_syncp_race_bf(s3, 1, 8));
  CHECK_FALSE(is_syncp_race_bf(s3, 2, 8));  // non-conflicting, trivially no race
  CHECK_FALSE(is_syncp_race_bf(s3, 1, 3));  // same thread
}

TEST_CASE("sync-preserving implies predictable") {
  for (uint64_t seed = 1; seed <= 60; ++seed) {
    Trace t = gen_random(sprace::testing::small_config(seed));
    for (uint32_t e1 = 1; e1 <= t.size(); ++e1)
      for (uint32_t e2 = e1 + 1; e2 <= t.size(); ++e2) {
        if (!conflicting(t.event(e1), t.event(e2))) continue;
        if (is_syncp_race_bf(t, e1, e2)) CHECK(is_predictable_race_bf(t, e1, e2));
      }
  }
}

TEST_CASE("every enumerated reordering satisfies the reordering conditions") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    Trace t = gen_random(sprace::testing::small_config(seed, 9));
    enumerate_correct_reorderings(t, 14, [&](const std::vector<uint32_t>& s) {
      REQUIRE(is_correct_reordering(t, s));
      // downward closure and order re-check by hand
      EventSet chosen(s.begin(), s.end());
      std::vector<uint32_t> preds;
      for (size_t i = 0; i < s.size(); ++i) {
        t.to_preds(s[i], preds);
        for (uint32_t p : preds) {
          CHECK(chosen.count(p));
          CHECK(std::find(s.begin(), s.begin() + i, p) != s.begin() + i);
        }
      }
    });
  }
}

TEST_CASE("sync-preserving reordering check rejects reversals") {
  Trace t = fixture("sigma5.trace");
  std::vector<uint32_t> reversal{4, 5, 1, 2, 6};
  CHECK(is_correct_reordering(t, reversal));
  CHECK_FALSE(is_sync_preserving_reordering(t, reversal));
  std::vector<uint32_t> in_order{1, 2, 3, 4, 5, 6};
  CHECK(is_sync_preserving_reordering(t, in_order));
}

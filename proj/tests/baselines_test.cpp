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

#include <set>

#include <doctest.h>

#include "sprace/closure_ref.hpp"
#include "sprace/generators.hpp"
#include "sprace/syncp.hpp"
#include "test_util.hpp"

using namespace sprace;
using sprace::testing::fixture;
using sprace::testing::from_text;

namespace {

std::set<uint32_t> racy_events(const std::vector<RaceReport>& rs) {
  std::set<uint32_t> out;
  for (const RaceReport& r : rs) out.insert(r.e2);
  return out;
}

}  // namespace

TEST_CASE("hb on the figure traces") {
  CHECK(hb_run(fixture("sigma2.trace")).empty());
  auto rs = hb_run(fixture("sigmaA.trace"));
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].e1 == 5);
  CHECK(rs[0].e2 == 6);
  // lock-free conflicting writes are always unordered
  auto free_rs = hb_run(from_text("t1|w|x\nt2|w|x\n"));
  REQUIRE(free_rs.size() == 1);
  CHECK(free_rs[0].e1 == 1);
  CHECK(free_rs[0].e2 == 2);
}

TEST_CASE("shb on the figure traces") {
  auto rs = shb_run(fixture("sigmaA.trace"));
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].e1 == 5);
  CHECK(rs[0].e2 == 6);
  CHECK(shb_run(fixture("sigma2.trace")).empty());  // e1 <= prev(e6) through the lock
  CHECK(shb_run(fixture("sigma1.trace")).empty());
  CHECK(shb_run(fixture("sigma4.trace")).empty());
}

TEST_CASE("hb respects fork/join edges") {
  CHECK(hb_run(from_text("t1|w|x\nt1|fork|t2\nt2|w|x\n")).empty());
  CHECK(hb_run(from_text("t1|fork|t2\nt2|w|x\nt1|join|t2\nt1|w|x\n")).empty());
  CHECK(hb_run(from_text("t1|fork|t2\nt2|w|x\nt1|w|x\n")).size() == 1);
}

TEST_CASE("shb reads race only against the write they do not observe") {
  // the read observes t1's write through no sync: racy under SHB
  auto rs = shb_run(from_text("t1|w|x\nt2|r|x\n"));
  REQUIRE(rs.size() == 1);
  // but a lock-protected observation orders them
  CHECK(shb_run(from_text("t1|acq|l\nt1|w|x\nt1|rel|l\nt2|acq|l\nt2|r|x\nt2|rel|l\n"))
            .empty());
}

TEST_CASE("shb reports subsume into sync-preserving reports on random traces") {
  for (uint64_t seed = 1; seed <= 150; ++seed) {
    Trace t = gen_random(sprace::testing::small_config(seed));
    auto shb = shb_run(t);
    auto syncp = racy_events(run_syncp(t));
    for (const RaceReport& r : shb) {
      CHECK(syncp.count(r.e2));
      CHECK(is_syncp_race_pair(t, r.e1, r.e2));
    }
  }
}

TEST_CASE("hb first race is also an shb race") {
  for (uint64_t seed = 1; seed <= 150; ++seed) {
    Trace t = gen_random(sprace::testing::small_config(seed));
    auto hb = hb_run(t);
    if (hb.empty()) continue;
    auto shb = racy_events(shb_run(t));
    CHECK(shb.count(hb.front().e2));
  }
}

TEST_CASE("lock-free traces: shb and syncp agree; hb over-reports beyond its first race") {
  // hb's racy-event set is a sound signal only up to the first report; on
  // lock-free traces the sound set is exactly shb's, and syncp matches it
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    GenConfig cfg = sprace::testing::small_config(seed);
    cfg.p_read = 0.5;
    cfg.p_write = 0.5;
    cfg.p_sync = 0.0;
    Trace t = gen_random(cfg);
    auto hb = racy_events(hb_run(t));
    auto shb = racy_events(shb_run(t));
    auto sp = racy_events(run_syncp(t));
    CHECK(shb == sp);
    for (uint32_t e : shb) CHECK(hb.count(e));
    if (!hb.empty()) CHECK(shb.count(*hb.begin()));
  }
}

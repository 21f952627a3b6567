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

// End-to-end acceptance suite. Each case prints one `[criterion N]` line so
// a full run reads as a checklist.

#include <fcntl.h>
#include <spawn.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include <doctest.h>

#include "sprace/baselines.hpp"
#include "sprace/closure_ref.hpp"
#include "sprace/generators.hpp"
#include "sprace/oracle_bf.hpp"
#include "sprace/preprocess.hpp"
#include "sprace/rfposet.hpp"
#include "sprace/syncp.hpp"
#include "sprace/trace_io.hpp"
#include "test_util.hpp"

using namespace sprace;
using sprace::testing::fixture;

namespace {

using Pairs = std::vector<std::pair<uint32_t, uint32_t>>;

Pairs pairs_of(const std::vector<RaceReport>& rs) {
  Pairs out;
  for (const RaceReport& r : rs) out.emplace_back(r.e1, r.e2);
  return out;
}

void verdict(int n, bool ok, const std::string& what) {
  std::printf("[criterion %d] %s - %s\n", n, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion ", n, ": ", what);
}

GenConfig sweep_config(uint64_t seed) {
  GenConfig cfg;
  cfg.events = 6 + static_cast<uint32_t>(seed % 7);  // 6..12
  cfg.threads = 2 + static_cast<uint32_t>(seed % 2);
  cfg.locks = 1 + static_cast<uint32_t>((seed / 2) % 2);
  cfg.vars = 1 + static_cast<uint32_t>((seed / 4) % 2);
  cfg.p_read = 0.3;
  cfg.p_write = 0.3;
  cfg.p_sync = 0.4;
  cfg.seed = seed * 7919 + 1;
  return cfg;
}

}  // namespace

TEST_CASE("criterion 1: fixture truth table") {
  bool ok = true;
  auto eq = [&](const char* name, const Pairs& got, const Pairs& want) {
    bool good = got == want;
    CHECK_MESSAGE(good, name);
    ok = ok && good;
  };

  Trace s2 = fixture("sigma2.trace");
  eq("sigma2 syncp", pairs_of(run_syncp(s2)), {{1, 6}});
  eq("sigma2 hb", pairs_of(hb_run(s2)), {});
  eq("sigma2 shb", pairs_of(shb_run(s2)), {});
  ok &= is_syncp_race_bf(s2, 1, 6) && is_syncp_race_pair(s2, 1, 6);

  Trace s1 = fixture("sigma1.trace");
  eq("sigma1 syncp", pairs_of(run_syncp(s1)), {{1, 6}});
  eq("sigma1 hb", pairs_of(hb_run(s1)), {});
  ok &= !is_syncp_race_pair(s1, 3, 6);

  Trace sa = fixture("sigmaA.trace");
  eq("sigmaA syncp", pairs_of(run_syncp(sa)), {{5, 6}});
  eq("sigmaA hb", pairs_of(hb_run(sa)), {{5, 6}});
  eq("sigmaA shb", pairs_of(shb_run(sa)), {{5, 6}});
  ok &= is_predictable_race_bf(sa, 5, 6);

  Trace sb = fixture("sigmaB.trace");
  eq("sigmaB syncp", pairs_of(run_syncp(sb)), {{1, 6}});
  eq("sigmaB hb", pairs_of(hb_run(sb)), {});
  ok &= is_predictable_race_bf(sb, 1, 6) && !is_predictable_race_bf(sb, 3, 6);
  ok &= !is_syncp_race_pair(sb, 3, 6);

  Trace sc = fixture("sigmaC.trace");
  eq("sigmaC syncp", pairs_of(run_syncp(sc)), {});
  eq("sigmaC hb", pairs_of(hb_run(sc)), {});
  eq("sigmaC shb", pairs_of(shb_run(sc)), {});
  ok &= !is_predictable_race_bf(sc, 3, 6) && !is_predictable_race_bf(sc, 1, 8);
  ok &= !is_syncp_race_pair(sc, 1, 8);

  Trace s4 = fixture("sigma4.trace");
  eq("sigma4 syncp", pairs_of(run_syncp(s4)), {{1, 5}, {1, 8}});
  eq("sigma4 hb", pairs_of(hb_run(s4)), {});
  eq("sigma4 shb", pairs_of(shb_run(s4)), {});
  ok &= syncp_races_with_thread(s4, 8, 0) == 1;
  ok &= !syncp_races_with_thread(s4, 8, 1).has_value();
  ok &= is_syncp_race_bf(s4, 1, 8) && is_syncp_race_bf(s4, 1, 5);

  Trace s3 = fixture("sigma3.trace");
  eq("sigma3 syncp", pairs_of(run_syncp(s3)), {{1, 8}});
  eq("sigma3 hb", pairs_of(hb_run(s3)), {});
  ok &= is_syncp_race_bf(s3, 1, 8);

  Trace s4p = fixture("sigma4p.trace");
  eq("sigma4p syncp", pairs_of(run_syncp(s4p)), {{1, 10}});
  eq("sigma4p hb", pairs_of(hb_run(s4p)), {});

  Trace s5 = fixture("sigma5.trace");
  eq("sigma5 syncp", pairs_of(run_syncp(s5)), {});
  ok &= is_predictable_race_bf(s5, 2, 6) && !is_syncp_race_bf(s5, 2, 6);

  Trace s6 = fixture("sigma6.trace");
  eq("sigma6 syncp", pairs_of(run_syncp(s6)), {});
  ok &= is_predictable_race_bf(s6, 2, 7) && !is_syncp_race_bf(s6, 2, 7);

  Trace sdp = fixture("sdp.trace");
  eq("sdp syncp", pairs_of(run_syncp(sdp)), {});
  eq("sdp hb", pairs_of(hb_run(sdp)), {});
  eq("sdp shb", pairs_of(shb_run(sdp)), {});
  BfLimits wide;
  wide.max_events = 20;
  ok &= !is_predictable_race_bf(sdp, 9, 20, wide);
  ok &= !is_predictable_race_bf(sdp, 4, 12, wide);
  ok &= !is_predictable_race_bf(sdp, 4, 18, wide);

  verdict(1, ok, "paper-figure fixtures match the cited detector and oracle outcomes");
}

TEST_CASE("criterion 2: three-way equivalence sweep over 1000 random traces") {
  uint64_t mismatches = 0;
  uint64_t races_seen = 0;
  for (uint64_t seed = 1; seed <= 1000; ++seed) {
    Trace t = gen_random(sweep_config(seed));
    Pairs engine = pairs_of(run_syncp(t));
    Pairs ref = syncp_races_ref(t);
    Pairs bf = syncp_races_bf(t);
    if (engine != ref || engine != bf) {
      ++mismatches;
      MESSAGE("mismatch at seed ", seed, "\n", emit_trace(t));
      continue;
    }
    races_seen += engine.size();
    for (const auto& [e1, e2] : engine)
      if (!is_predictable_race_bf(t, e1, e2)) {
        ++mismatches;
        MESSAGE("unsound report at seed ", seed);
      }
  }
  verdict(2, mismatches == 0,
          "engine == closure reference == enumeration oracle, all reports predictable (" +
              std::to_string(races_seen) + " races)");
}

TEST_CASE("criterion 3: shb subsumption over the same 1000 traces") {
  uint64_t violations = 0;
  uint64_t pairs = 0;
  for (uint64_t seed = 1; seed <= 1000; ++seed) {
    Trace t = gen_random(sweep_config(seed));
    std::set<uint32_t> syncp_racy;
    for (const RaceReport& r : run_syncp(t)) syncp_racy.insert(r.e2);
    for (const RaceReport& r : shb_run(t)) {
      ++pairs;
      if (!syncp_racy.count(r.e2) || !is_syncp_race_pair(t, r.e1, r.e2)) ++violations;
    }
  }
  verdict(3, violations == 0,
          "every shb race pair is a sync-preserving race (" + std::to_string(pairs) +
              " pairs)");
}

TEST_CASE("criterion 4: equality-language construction") {
  uint64_t mismatches = 0;
  auto check_pair = [&](const std::string& u, const std::string& v) {
    Trace t = gen_equality(u, v);
    auto rs = run_syncp(t);
    bool race = !rs.empty();
    if (race != (u != v)) {
      ++mismatches;
      MESSAGE("detector disagrees with u!=v for u=", u, " v=", v);
      return;
    }
    if (race) {
      BfLimits lim;
      lim.max_events = 128;
      lim.max_nodes = 10'000'000;
      if (!is_syncp_race_bf(t, rs.front().e1, rs.front().e2, lim)) {
        ++mismatches;
        MESSAGE("oracle rejects reported race for u=", u, " v=", v);
      }
    }
  };
  for (uint32_t a = 0; a < 16; ++a) {
    for (uint32_t b = 0; b < 16; ++b) {
      std::string u, v;
      for (int i = 3; i >= 0; --i) {
        u.push_back((a >> i) & 1 ? '1' : '0');
        v.push_back((b >> i) & 1 ? '1' : '0');
      }
      check_pair(u, v);
    }
  }
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    std::string u, v;
    for (int j = 0; j < 8; ++j) u.push_back(rng() % 2 ? '1' : '0');
    if (i % 5 == 0)
      v = u;  // keep equal pairs in the sample
    else
      for (int j = 0; j < 8; ++j) v.push_back(rng() % 2 ? '1' : '0');
    check_pair(u, v);
  }
  verdict(4, mismatches == 0,
          "race iff u != v on all 256 n=4 pairs and 200 sampled n=8 pairs, "
          "races confirmed sync-preserving by enumeration");
}

namespace {

// Normalized random instances: 2-3 triplets over up to 3 threads for the
// (w, r) legs, interfering writes in their own threads, plus random extra
// cross edges.
RfPoset random_poset(std::mt19937_64& rng) {
  RfPoset p;
  uint32_t triplets = 2 + static_cast<uint32_t>(rng() % 2);
  uint32_t id = 1;
  for (uint32_t i = 0; i < triplets; ++i) {
    std::string var = "x" + std::to_string(i);
    std::string wr_thread = "t" + std::to_string(rng() % 3);
    p.events.push_back({id, wr_thread, true, var});
    p.events.push_back({id + 1, wr_thread, false, var});
    p.events.push_back({id + 2, "u" + std::to_string(i), true, var});
    p.rf[id + 1] = id;
    id += 3;
  }
  uint32_t extra = static_cast<uint32_t>(rng() % 3);
  for (uint32_t i = 0; i < extra; ++i) {
    uint32_t a = p.events[rng() % p.events.size()].id;
    uint32_t b = p.events[rng() % p.events.size()].id;
    if (a != b) p.edges.emplace_back(a, b);
  }
  return p;
}

}  // namespace

TEST_CASE("criterion 5: hardness-chain equivalence on 200 random rf-posets") {
  std::mt19937_64 rng(5150);
  uint64_t mismatches = 0;
  int checked = 0;
  RfPosetLimits rlim;
  BfLimits blim;
  blim.max_events = 160;
  blim.max_nodes = 50'000'000;
  while (checked < 200) {
    RfPoset p = random_poset(rng);
    if (!validate_rfposet(p).empty()) continue;  // cyclic draw
    ++checked;
    bool realizable = realizability_bf(p, rlim).has_value();
    ReverseInstance inst = build_reverse_instance(p);
    bool reversible = reverse_realizability_bf(inst.poset, rlim);
    RaceInstance ri = build_race_instance(inst);
    bool racy = is_predictable_race_bf(ri.trace, ri.target.first, ri.target.second, blim);
    if (realizable != reversible || reversible != racy) {
      ++mismatches;
      MESSAGE("chain mismatch: realizable=", realizable, " reversible=", reversible,
              " racy=", racy, "\n", emit_rfposet(p));
    }
  }
  verdict(5, mismatches == 0,
          "realizability == reverse realizability == race-instance prediction on 200 posets");
}

namespace {

struct ChildRun {
  double seconds = 0;
  long max_rss_kb = 0;
  int exit_code = -1;
};

// posix_spawn so the child's peak memory is its own: a plain fork would
// charge this process's copy-on-write footprint to the child's maxrss
ChildRun run_child(const std::vector<std::string>& argv) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<char*> cargv;
  for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 1, "/dev/null", O_WRONLY, 0);
  pid_t pid = -1;
  int rc = posix_spawn(&pid, cargv[0], &actions, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  REQUIRE(rc == 0);
  int status = 0;
  rusage ru{};
  wait4(pid, &status, 0, &ru);
  ChildRun r;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.max_rss_kb = ru.ru_maxrss;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

ChildRun run_detect(const std::string& cli, const std::string& input) {
  return run_child({cli, "detect", "--algo", "syncp", "--input", input});
}

}  // namespace

TEST_CASE("criterion 6: near-linear time and space at desk scale") {
  const std::string small_path = "/tmp/sprace_accept_1e6.trace";
  const std::string big_path = "/tmp/sprace_accept_1e7.trace";
  auto gen = [&](const std::string& events, const std::string& out) {
    return run_child({SPRACE_CLI, "gen", "random", "--threads", "4", "--vars", "8",
                      "--locks", "4", "--p-read", "0.35", "--p-write", "0.35",
                      "--p-sync", "0.30", "--seed", "60601", "--events", events,
                      "--out", out});
  };
  REQUIRE(gen("1000000", small_path).exit_code == 0);
  REQUIRE(gen("10000000", big_path).exit_code == 0);

  ChildRun small = run_detect(SPRACE_CLI, small_path);
  ChildRun big = run_detect(SPRACE_CLI, big_path);
  std::remove(small_path.c_str());
  std::remove(big_path.c_str());

  bool ran = (small.exit_code == 0 || small.exit_code == 1) &&
             (big.exit_code == 0 || big.exit_code == 1);
  double time_ratio = big.seconds / std::max(small.seconds, 1e-9);
  double mem_ratio = static_cast<double>(big.max_rss_kb) /
                     std::max<double>(small.max_rss_kb, 1.0);
  bool ok = ran && time_ratio <= 15.0 && big.seconds <= 120.0 && mem_ratio <= 15.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "1e6: %.2fs %ldMB, 1e7: %.2fs %ldMB, time x%.1f, mem x%.1f",
                small.seconds, small.max_rss_kb / 1024, big.seconds,
                big.max_rss_kb / 1024, time_ratio, mem_ratio);
  verdict(6, ok, buf);
}

TEST_CASE("criterion 7: byte-identical reports across runs") {
  bool ok = true;
  for (const char* f :
       {"sigma1.trace", "sigma2.trace", "sigma3.trace", "sigma4.trace",
        "sigma4p.trace", "sigma5.trace", "sigma6.trace", "sigmaA.trace",
        "sigmaB.trace", "sigmaC.trace", "sdp.trace", "empty.trace"}) {
    for (const char* algo : {"syncp", "hb", "shb"}) {
      std::string cmd = std::string(SPRACE_CLI) + " detect --algo " + algo +
                        " --format json --input " + std::string(FIXTURE_DIR) + "/" + f +
                        " 2>/dev/null";
      auto slurp = [&]() {
        FILE* p = popen(cmd.c_str(), "r");
        std::string out;
        char buf[4096];
        size_t n;
        while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
        pclose(p);
        return out;
      };
      std::string a = slurp(), b = slurp();
      if (a != b || a.empty()) ok = false;
    }
  }
  verdict(7, ok, "detect output identical across repeated runs on all fixtures");
}

TEST_CASE("criterion 8: closure algebra on 500 random samples") {
  std::mt19937_64 rng(808);
  uint64_t violations = 0;
  auto subset = [](const EventSet& a, const EventSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  for (int sample = 0; sample < 500; ++sample) {
    Trace t = gen_random(sweep_config(static_cast<uint64_t>(sample) + 4000));
    EventSet s, s2;
    for (uint32_t i = 1; i <= t.size(); ++i) {
      if (rng() % 3 == 0) s.insert(i);
      if (rng() % 3 == 0) s2.insert(i);
    }
    for (uint32_t i : s) s2.insert(i);  // s subseteq s2
    for (auto* cl : {&tl_closure, &sp_closure}) {
      EventSet cs = (*cl)(t, s);
      if (!subset(s, cs)) ++violations;
      if (!subset(cs, (*cl)(t, s2))) ++violations;
      if ((*cl)(t, cs) != cs) ++violations;
    }
    // ideal monotonicity along one random thread step
    uint32_t e1 = 1 + static_cast<uint32_t>(rng() % t.size());
    uint32_t e2 = 1 + static_cast<uint32_t>(rng() % t.size());
    for (uint32_t f1 = e1 + 1; f1 <= t.size(); ++f1) {
      if (t.event(f1).thread != t.event(e1).thread) continue;
      if (!subset(sp_ideal(t, e1, e2), sp_ideal(t, f1, e2))) ++violations;
      break;
    }
    for (uint32_t f2 = e2 + 1; f2 <= t.size(); ++f2) {
      if (t.event(f2).thread != t.event(e2).thread) continue;
      if (!subset(sp_ideal(t, e1, e2), sp_ideal(t, e1, f2))) ++violations;
      break;
    }
  }
  verdict(8, violations == 0,
          "closures extensive/monotone/idempotent and ideals monotone on 500 samples");
}

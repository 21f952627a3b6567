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

#include "sprace/generators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace sprace {

Trace gen_random(const GenConfig& cfg) {
  if (cfg.threads == 0) throw std::invalid_argument("threads must be positive");
  double sum = cfg.p_read + cfg.p_write + cfg.p_sync;
  if (cfg.p_read < 0 || cfg.p_write < 0 || cfg.p_sync < 0 ||
      std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("event mix probabilities must be nonnegative and sum to 1");
  if (cfg.locks == 0 && cfg.p_sync > 0)
    throw std::invalid_argument("sync probability requires at least one lock");
  if (cfg.vars == 0 && cfg.p_read + cfg.p_write > 0)
    throw std::invalid_argument("access probability requires at least one variable");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  TraceBuilder b;
  for (uint32_t t = 0; t < cfg.threads; ++t) b.intern_thread("t" + std::to_string(t + 1));
  for (uint32_t l = 0; l < cfg.locks; ++l) b.intern_lock("l" + std::to_string(l + 1));
  for (uint32_t v = 0; v < cfg.vars; ++v) b.intern_var("x" + std::to_string(v + 1));

  // lock -> holding thread (+1), 0 = free; per-thread held list
  std::vector<uint32_t> holder(cfg.locks, 0);
  std::vector<std::vector<uint32_t>> held(cfg.threads);

  for (uint32_t i = 0; i < cfg.events; ++i) {
    uint32_t t = static_cast<uint32_t>(rng() % cfg.threads);
    double p = coin(rng);
    if (p < cfg.p_read) {
      b.add_raw(t, Op::kRead, static_cast<uint32_t>(rng() % cfg.vars));
      continue;
    }
    if (p < cfg.p_read + cfg.p_write) {
      b.add_raw(t, Op::kWrite, static_cast<uint32_t>(rng() % cfg.vars));
      continue;
    }
    // sync: flip between release (if holding) and acquire (if any lock free)
    std::vector<uint32_t> free_locks;
    for (uint32_t l = 0; l < cfg.locks; ++l)
      if (holder[l] == 0) free_locks.push_back(l);
    bool can_release = !held[t].empty();
    bool can_acquire = !free_locks.empty();
    bool do_release;
    if (can_release && can_acquire)
      do_release = (rng() & 1) != 0;
    else if (can_release)
      do_release = true;
    else if (can_acquire)
      do_release = false;
    else {
      // every lock held by other threads and t holds none
      b.add_raw(t, cfg.vars ? Op::kRead : Op::kAcquire,
                cfg.vars ? static_cast<uint32_t>(rng() % cfg.vars) : 0);
      continue;
    }
    if (do_release) {
      uint32_t l = held[t][rng() % held[t].size()];
      b.add_raw(t, Op::kRelease, l);
      holder[l] = 0;
      held[t].erase(std::find(held[t].begin(), held[t].end(), l));
    } else {
      uint32_t l = free_locks[rng() % free_locks.size()];
      b.add_raw(t, Op::kAcquire, l);
      holder[l] = t + 1;
      held[t].push_back(l);
    }
  }
  return b.finish();
}

namespace {

// Subsets of an m-element lattice level by level, numeric ascending within a
// level. ascending=false walks from the full set down.
std::vector<uint32_t> lattice_walk(uint32_t m, bool ascending) {
  std::vector<uint32_t> subsets;
  for (uint32_t mask = 0; mask < (1u << m); ++mask) subsets.push_back(mask);
  std::stable_sort(subsets.begin(), subsets.end(), [&](uint32_t a, uint32_t b) {
    int ca = std::popcount(a), cb = std::popcount(b);
    if (ca != cb) return ascending ? ca < cb : ca > cb;
    return a < b;
  });
  return subsets;
}

}  // namespace

Trace gen_equality(const std::string& u, const std::string& v) {
  const size_t n = u.size();
  if (n == 0 || n != v.size())
    throw std::invalid_argument("bit strings must have equal nonzero length");
  if ((n & (n - 1)) != 0)
    throw std::invalid_argument("bit string length must be a power of two");
  for (char c : u + v)
    if (c != '0' && c != '1') throw std::invalid_argument("bit strings must be binary");

  const uint32_t m = static_cast<uint32_t>(std::countr_zero(n));  // log2 n
  TraceBuilder b;
  b.intern_thread("t1");
  b.intern_thread("t2");
  std::vector<uint32_t> a_locks(m), b_locks(m);
  for (uint32_t i = 0; i < m; ++i) a_locks[i] = b.intern_lock("a" + std::to_string(i + 1));
  for (uint32_t i = 0; i < m; ++i) b_locks[i] = b.intern_lock("b" + std::to_string(i + 1));
  uint32_t c_lock = b.intern_lock("c");
  uint32_t x = b.intern_var("x");

  std::vector<uint32_t> a_walk = lattice_walk(m, true);
  std::vector<uint32_t> b_walk = lattice_walk(m, false);

  auto emit = [&](uint32_t thread, uint32_t a_mask, uint32_t b_mask, bool write) {
    std::vector<uint32_t> locks;
    for (uint32_t i = 0; i < m; ++i)
      if (a_mask & (1u << i)) locks.push_back(a_locks[i]);
    for (uint32_t i = 0; i < m; ++i)
      if (b_mask & (1u << i)) locks.push_back(b_locks[i]);
    for (uint32_t l : locks) b.add_raw(thread, Op::kAcquire, l);
    if (write) b.add_raw(thread, Op::kAcquire, c_lock);
    b.add_raw(thread, write ? Op::kWrite : Op::kRead, x);
    if (write) b.add_raw(thread, Op::kRelease, c_lock);
    for (auto it = locks.rbegin(); it != locks.rend(); ++it)
      b.add_raw(thread, Op::kRelease, *it);
  };

  // Blocks are interleaved per position. Appending all of thread 2 after
  // thread 1 would break the construction: the earlier complementary
  // sections of thread 2 would then be forced after thread 1's still-open
  // acquires at the candidate position, so no sync-preserving witness could
  // schedule them.
  const uint32_t full = (1u << m) - 1;
  for (size_t i = 0; i < n; ++i) {
    emit(0, a_walk[i], b_walk[i], u[i] == '1');
    emit(1, full & ~a_walk[i], full & ~b_walk[i], v[i] == '1');
  }
  return b.finish();
}

}  // namespace sprace

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

#include "sprace/rfposet.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace sprace {

const RfEvent* RfPoset::find(uint32_t id) const {
  for (const RfEvent& e : events)
    if (e.id == id) return &e;
  return nullptr;
}

namespace {

// Dense view: events renumbered 0..n-1 in listing order, threads and vars
// interned, reachability closure over explicit edges plus thread order.
struct Dense {
  const RfPoset* src = nullptr;
  uint32_t n = 0;
  std::unordered_map<uint32_t, uint32_t> id_to_ix;
  std::vector<uint32_t> thread;  // dense thread id per event
  std::vector<uint32_t> var;
  std::vector<bool> is_write;
  std::vector<int32_t> rf;  // read -> write ix, -1 = none
  std::vector<std::vector<bool>> reach;  // strict: reach[a][b] = a < b
  uint32_t num_threads = 0;
  uint32_t num_vars = 0;
  bool cyclic = false;

  uint32_t ix(uint32_t id) const {
    auto it = id_to_ix.find(id);
    if (it == id_to_ix.end()) throw std::invalid_argument("unknown event id");
    return it->second;
  }
};

Dense densify(const RfPoset& p,
              const std::vector<std::pair<uint32_t, uint32_t>>& extra_edges = {}) {
  Dense d;
  d.src = &p;
  d.n = static_cast<uint32_t>(p.events.size());
  std::unordered_map<std::string, uint32_t> tmap, vmap;
  std::vector<int32_t> last_of_thread;
  std::vector<std::vector<uint32_t>> succ(d.n);
  for (uint32_t i = 0; i < d.n; ++i) {
    const RfEvent& e = p.events[i];
    d.id_to_ix[e.id] = i;
    auto [tit, tnew] = tmap.emplace(e.thread, static_cast<uint32_t>(tmap.size()));
    d.thread.push_back(tit->second);
    if (tnew) last_of_thread.push_back(-1);
    auto [vit, vnew] = vmap.emplace(e.var, static_cast<uint32_t>(vmap.size()));
    (void)vnew;
    d.var.push_back(vit->second);
    d.is_write.push_back(e.is_write);
    if (last_of_thread[tit->second] >= 0)
      succ[last_of_thread[tit->second]].push_back(i);
    last_of_thread[tit->second] = static_cast<int32_t>(i);
  }
  d.num_threads = static_cast<uint32_t>(tmap.size());
  d.num_vars = static_cast<uint32_t>(vmap.size());
  d.rf.assign(d.n, -1);
  for (const auto& [r, w] : p.rf) d.rf[d.ix(r)] = static_cast<int32_t>(d.ix(w));
  for (const auto& [a, b] : p.edges) succ[d.ix(a)].push_back(d.ix(b));
  for (const auto& [a, b] : extra_edges) succ[d.ix(a)].push_back(d.ix(b));

  // forward DFS from each node; n stays small by construction
  d.reach.assign(d.n, std::vector<bool>(d.n, false));
  for (uint32_t s = 0; s < d.n; ++s) {
    std::vector<uint32_t> stack = {s};
    std::vector<bool> seen(d.n, false);
    while (!stack.empty()) {
      uint32_t cur = stack.back();
      stack.pop_back();
      for (uint32_t nx : succ[cur]) {
        if (!seen[nx]) {
          seen[nx] = true;
          d.reach[s][nx] = true;
          stack.push_back(nx);
        }
      }
    }
    if (d.reach[s][s]) d.cyclic = true;
  }
  return d;
}

}  // namespace

std::vector<std::string> validate_rfposet(const RfPoset& p) {
  std::vector<std::string> errs;
  std::unordered_set<uint32_t> ids;
  for (const RfEvent& e : p.events)
    if (!ids.insert(e.id).second)
      errs.push_back("duplicate event id " + std::to_string(e.id));
  if (!errs.empty()) return errs;

  auto check_id = [&](uint32_t id, const char* what) {
    if (!ids.count(id)) {
      errs.push_back(std::string(what) + " references unknown id " + std::to_string(id));
      return false;
    }
    return true;
  };
  for (const auto& [a, b] : p.edges) {
    check_id(a, "order");
    check_id(b, "order");
  }
  for (const auto& [r, w] : p.rf) {
    if (!check_id(r, "rf") || !check_id(w, "rf")) continue;
    const RfEvent* re = p.find(r);
    const RfEvent* we = p.find(w);
    if (re->is_write) errs.push_back("rf key " + std::to_string(r) + " is not a read");
    if (!we->is_write) errs.push_back("rf value " + std::to_string(w) + " is not a write");
    if (re->var != we->var)
      errs.push_back("rf pair " + std::to_string(r) + "->" + std::to_string(w) +
                     " crosses variables");
  }
  for (const RfEvent& e : p.events)
    if (!e.is_write && !p.rf.count(e.id))
      errs.push_back("read " + std::to_string(e.id) + " has no reads-from entry");
  if (p.distinguished) {
    auto [w, r, wp] = *p.distinguished;
    if (check_id(w, "distinguished") && check_id(r, "distinguished") &&
        check_id(wp, "distinguished")) {
      const RfEvent* we = p.find(w);
      const RfEvent* re = p.find(r);
      const RfEvent* pe = p.find(wp);
      auto it = p.rf.find(r);
      if (re->is_write || it == p.rf.end() || it->second != w)
        errs.push_back("distinguished read must observe the distinguished write");
      if (!we->is_write || !pe->is_write || we->var != pe->var ||
          we->thread == pe->thread)
        errs.push_back("distinguished writes must conflict");
    }
  }
  if (!errs.empty()) return errs;
  Dense d = densify(p);
  if (d.cyclic) errs.push_back("order is cyclic");
  return errs;
}

std::vector<std::pair<uint32_t, uint32_t>> dominant_pairs(const RfPoset& p) {
  Dense d = densify(p);
  if (d.cyclic) throw std::invalid_argument("order is cyclic");
  std::vector<std::pair<uint32_t, uint32_t>> out;
  for (uint32_t a = 0; a < d.n; ++a) {
    for (uint32_t b = 0; b < d.n; ++b) {
      if (d.thread[a] == d.thread[b] || !d.reach[a][b]) continue;
      bool dominant = true;
      for (uint32_t a2 = 0; a2 < d.n && dominant; ++a2) {
        if (d.thread[a2] != d.thread[a] || !(a2 == a || d.reach[a][a2])) continue;
        for (uint32_t b2 = 0; b2 < d.n; ++b2) {
          if (d.thread[b2] != d.thread[b] || !(b2 == b || d.reach[b2][b])) continue;
          if (a2 == a && b2 == b) continue;
          if (d.reach[a2][b2]) {
            dominant = false;
            break;
          }
        }
      }
      if (dominant) out.emplace_back(p.events[a].id, p.events[b].id);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Linearization search with reads-from pruning, memoized on
// (chosen, per-variable last write).
struct LinSearch {
  const Dense& d;
  uint64_t chosen = 0;
  std::vector<int32_t> last_write;
  std::vector<uint64_t> pred_mask;
  std::vector<uint32_t> seq;
  std::unordered_set<std::string> seen;
  uint64_t nodes = 0;
  uint64_t max_nodes;

  LinSearch(const Dense& dd, uint64_t budget) : d(dd), max_nodes(budget) {
    last_write.assign(d.num_vars, -1);
    pred_mask.assign(d.n, 0);
    for (uint32_t a = 0; a < d.n; ++a)
      for (uint32_t b = 0; b < d.n; ++b)
        if (d.reach[a][b]) pred_mask[b] |= uint64_t{1} << a;
  }

  std::string key() const {
    std::string k(reinterpret_cast<const char*>(&chosen), sizeof(chosen));
    k.append(reinterpret_cast<const char*>(last_write.data()),
             last_write.size() * sizeof(int32_t));
    return k;
  }

  bool run() {
    if (seq.size() == d.n) return true;
    if (++nodes > max_nodes)
      throw std::runtime_error("rf-poset search node budget exhausted");
    if (!seen.insert(key()).second) return false;
    for (uint32_t e = 0; e < d.n; ++e) {
      if (chosen & (uint64_t{1} << e)) continue;
      if ((pred_mask[e] & chosen) != pred_mask[e]) continue;
      if (!d.is_write[e] && d.rf[e] != last_write[d.var[e]]) continue;
      int32_t undo = -1;
      chosen |= uint64_t{1} << e;
      seq.push_back(e);
      if (d.is_write[e]) {
        undo = last_write[d.var[e]];
        last_write[d.var[e]] = static_cast<int32_t>(e);
      }
      if (run()) return true;
      if (d.is_write[e]) last_write[d.var[e]] = undo;
      seq.pop_back();
      chosen &= ~(uint64_t{1} << e);
    }
    return false;
  }
};

std::optional<std::vector<uint32_t>> realize(const RfPoset& p, uint32_t cap,
                                             uint64_t budget,
                                             const std::vector<std::pair<uint32_t, uint32_t>>& extra) {
  if (p.events.size() > cap)
    throw std::invalid_argument("rf-poset of " + std::to_string(p.events.size()) +
                                " events exceeds cap " + std::to_string(cap));
  if (p.events.size() > 64) throw std::invalid_argument("rf-poset too large");
  Dense d = densify(p, extra);
  if (d.cyclic) return std::nullopt;
  // reads lacking an rf entry can never be scheduled consistently
  for (uint32_t e = 0; e < d.n; ++e)
    if (!d.is_write[e] && d.rf[e] < 0)
      throw std::invalid_argument("read without reads-from entry");
  LinSearch search(d, budget);
  if (!search.run()) return std::nullopt;
  std::vector<uint32_t> witness;
  for (uint32_t ix : search.seq) witness.push_back(p.events[ix].id);
  return witness;
}

}  // namespace

std::optional<std::vector<uint32_t>> realizability_bf(const RfPoset& p,
                                                      const RfPosetLimits& lim) {
  return realize(p, lim.max_events, lim.max_nodes, {});
}

bool reverse_realizability_bf(const RfPoset& p, const RfPosetLimits& lim) {
  if (!p.distinguished)
    throw std::invalid_argument("reverse realizability requires a distinguished triplet");
  auto [w, r, wp] = *p.distinguished;
  return realize(p, lim.max_events_reverse, lim.max_nodes, {{w, r}, {w, wp}}).has_value();
}

namespace {

struct TripletRef {
  uint32_t w, r, wp;
};

// All (w, r, w') with rf(r) = w and w' a conflicting write.
std::vector<TripletRef> all_triplets(const Dense& d) {
  std::vector<TripletRef> out;
  for (uint32_t r = 0; r < d.n; ++r) {
    if (d.is_write[r] || d.rf[r] < 0) continue;
    uint32_t w = static_cast<uint32_t>(d.rf[r]);
    for (uint32_t wp = 0; wp < d.n; ++wp) {
      if (!d.is_write[wp] || wp == w) continue;
      if (d.var[wp] != d.var[w] || d.thread[wp] == d.thread[w]) continue;
      out.push_back({w, r, wp});
    }
  }
  return out;
}

}  // namespace

ReverseInstance build_reverse_instance(const RfPoset& p) {
  auto errs = validate_rfposet(p);
  if (!errs.empty()) throw std::invalid_argument("invalid rf-poset: " + errs.front());
  Dense d = densify(p);

  // normalized form: every read observes an earlier thread-local write with
  // no same-variable write of that thread in between, and every event
  // belongs to some triplet
  std::vector<TripletRef> triplets = all_triplets(d);
  std::vector<bool> in_triplet(d.n, false);
  for (const TripletRef& t : triplets) {
    in_triplet[t.w] = true;
    in_triplet[t.r] = true;
    in_triplet[t.wp] = true;
  }
  for (uint32_t r = 0; r < d.n; ++r) {
    if (d.is_write[r]) continue;
    if (d.rf[r] < 0)
      throw std::invalid_argument("normalization failed: read without observed write");
    uint32_t w = static_cast<uint32_t>(d.rf[r]);
    if (d.thread[w] != d.thread[r] || !d.reach[w][r])
      throw std::invalid_argument("normalization failed: read observes non-local write");
    for (uint32_t m = 0; m < d.n; ++m) {
      if (m == w || !d.is_write[m] || d.var[m] != d.var[r]) continue;
      if (d.thread[m] == d.thread[r] && d.reach[w][m] && d.reach[m][r])
        throw std::invalid_argument("normalization failed: interposed local write");
    }
  }
  for (uint32_t e = 0; e < d.n; ++e)
    if (!in_triplet[e])
      throw std::invalid_argument("normalization failed: event " +
                                  std::to_string(p.events[e].id) +
                                  " belongs to no triplet");

  auto doms = dominant_pairs(p);

  ReverseInstance inst;
  RfPoset& out = inst.poset;
  uint32_t next_id = 0;
  for (const RfEvent& e : p.events) next_id = std::max(next_id, e.id + 1);

  // originals keep ids; events must be listed per-thread in thread order,
  // which listing order already guarantees
  out.events = p.events;
  out.rf = p.rf;

  struct Gadget {
    uint32_t w, r, wp;  // fresh ids
    uint32_t e1, e2;    // anchor ids
  };
  std::vector<Gadget> gadgets;
  // group dominant pairs by (thread of e1, thread of e2); the staircase
  // order within a group is ascending in both anchors
  std::sort(doms.begin(), doms.end(), [&](const auto& a, const auto& b) {
    uint32_t ta1 = d.thread[d.ix(a.first)], tb1 = d.thread[d.ix(b.first)];
    uint32_t ta2 = d.thread[d.ix(a.second)], tb2 = d.thread[d.ix(b.second)];
    if (ta1 != tb1) return ta1 < tb1;
    if (ta2 != tb2) return ta2 < tb2;
    return static_cast<bool>(d.reach[d.ix(a.first)][d.ix(b.first)]);
  });
  for (const auto& [e1, e2] : doms) {
    Gadget g;
    g.e1 = e1;
    g.e2 = e2;
    g.w = next_id++;
    g.r = next_id++;
    g.wp = next_id++;
    std::string gx = "g" + std::to_string(e1) + "_" + std::to_string(e2);
    std::string xt = "X" + std::to_string(d.thread[d.ix(e1)]) + "_" +
                     std::to_string(d.thread[d.ix(e2)]);
    std::string yt = "Y" + std::to_string(d.thread[d.ix(e1)]) + "_" +
                     std::to_string(d.thread[d.ix(e2)]);
    out.events.push_back({g.w, xt, true, gx});
    out.events.push_back({g.r, xt, false, gx});
    out.events.push_back({g.wp, yt, true, gx});
    out.rf[g.r] = g.w;
    gadgets.push_back(g);
  }

  uint32_t lam_w = next_id++;
  uint32_t lam_r = next_id++;
  uint32_t lam_wp = next_id++;
  out.events.push_back({lam_w, "WL", true, "lam"});
  out.events.push_back({lam_r, "WL", false, "lam"});
  out.events.push_back({lam_wp, "WPL", true, "lam"});
  out.rf[lam_r] = lam_w;
  out.distinguished = {{lam_w, lam_r, lam_wp}};

  for (const Gadget& g : gadgets) {
    out.edges.emplace_back(g.e1, g.r);    // anchor before gadget read
    out.edges.emplace_back(g.wp, g.e2);   // interfering write before anchor
    out.edges.emplace_back(g.w, lam_r);   // gadget writes before the read of the triplet
    out.edges.emplace_back(lam_wp, g.wp); // triplet's interfering write first
  }

  // witness: linearize the order strengthened by w' before w in every triplet
  RfPoset q = out;
  Dense dq = densify(out);
  for (const TripletRef& t : all_triplets(dq))
    q.edges.emplace_back(out.events[t.wp].id, out.events[t.w].id);
  Dense dqq = densify(q);
  if (dqq.cyclic)
    throw std::invalid_argument(
        "normalization failed: conflicting observed writes leave no witness order");
  // deterministic Kahn linearization, smallest id first
  {
    uint32_t n = dqq.n;
    std::vector<uint32_t> indeg(n, 0);
    std::vector<std::vector<uint32_t>> succ(n);
    for (uint32_t a = 0; a < n; ++a)
      for (uint32_t b = 0; b < n; ++b)
        if (dqq.reach[a][b]) {
          succ[a].push_back(b);
          ++indeg[b];
        }
    std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>> ready;
    for (uint32_t i = 0; i < n; ++i)
      if (indeg[i] == 0) ready.push(i);
    while (!ready.empty()) {
      uint32_t cur = ready.top();
      ready.pop();
      inst.witness.push_back(q.events[cur].id);
      for (uint32_t nx : succ[cur])
        if (--indeg[nx] == 0) ready.push(nx);
    }
    assert(inst.witness.size() == n);
  }
  return inst;
}

RaceInstance build_race_instance(const ReverseInstance& inst) {
  const RfPoset& p = inst.poset;
  if (!p.distinguished)
    throw std::invalid_argument("race instance requires a distinguished triplet");
  auto errs = validate_rfposet(p);
  if (!errs.empty()) throw std::invalid_argument("invalid instance: " + errs.front());
  Dense d = densify(p);
  uint32_t wbar = d.ix((*p.distinguished)[0]);
  uint32_t wbar_p = d.ix((*p.distinguished)[2]);
  uint32_t t_wbar = d.thread[wbar];
  uint32_t t_wbar_p = d.thread[wbar_p];
  if (t_wbar == t_wbar_p)
    throw std::invalid_argument("distinguished writes must be in different threads");

  if (inst.witness.size() != p.events.size())
    throw std::invalid_argument("witness must linearize the instance");
  for (size_t i = 0; i < inst.witness.size(); ++i)
    for (size_t j = i + 1; j < inst.witness.size(); ++j)
      if (d.reach[d.ix(inst.witness[j])][d.ix(inst.witness[i])])
        throw std::invalid_argument("witness violates the partial order");

  auto doms = dominant_pairs(p);
  std::vector<std::vector<uint32_t>> w_after(d.n), r_before(d.n);
  for (uint32_t g = 0; g < doms.size(); ++g) {
    w_after[d.ix(doms[g].first)].push_back(g);
    r_before[d.ix(doms[g].second)].push_back(g);
  }

  // thread names indexed densely; per-thread first/last witness positions
  std::vector<std::string> tname(d.num_threads);
  std::vector<uint32_t> last_pos(d.num_threads, 0);
  std::vector<uint32_t> first_pos(d.num_threads, UINT32_MAX);
  for (uint32_t i = 0; i < d.n; ++i) tname[d.thread[i]] = p.events[i].thread;
  for (uint32_t pos = 0; pos < inst.witness.size(); ++pos) {
    uint32_t t = d.thread[d.ix(inst.witness[pos])];
    last_pos[t] = pos;
    if (first_pos[t] == UINT32_MAX) first_pos[t] = pos;
  }

  TraceBuilder b;
  for (uint32_t t = 0; t < d.num_threads; ++t) b.intern_thread(tname[t]);
  auto gadget_var = [&](uint32_t g) {
    return "g" + std::to_string(doms[g].first) + "_" + std::to_string(doms[g].second);
  };
  auto orig_var = [&](uint32_t e) { return "v_" + p.events[e].var; };

  uint32_t emitted = 0;
  uint32_t wy_idx = 0;
  auto emit = [&](uint32_t thread, Op op, const std::string& target) {
    b.add(tname[thread], op, target);
    ++emitted;
  };

  for (uint32_t pos = 0; pos < inst.witness.size(); ++pos) {
    uint32_t e = d.ix(inst.witness[pos]);
    uint32_t t = d.thread[e];
    if (t == t_wbar_p && pos == first_pos[t]) emit(t, Op::kAcquire, "ell");
    for (uint32_t g : r_before[e]) emit(t, Op::kRead, gadget_var(g));
    if (e == wbar) emit(t, Op::kAcquire, "ell");
    emit(t, d.is_write[e] ? Op::kWrite : Op::kRead, orig_var(e));
    if (e == wbar) emit(t, Op::kRelease, "ell");
    for (uint32_t g : w_after[e]) emit(t, Op::kWrite, gadget_var(g));
    if (t != t_wbar && t != t_wbar_p && pos == last_pos[t])
      emit(t, Op::kWrite, "p_" + tname[t]);
    if (t == t_wbar_p && pos == last_pos[t]) {
      emit(t, Op::kWrite, "y");
      wy_idx = emitted;
      emit(t, Op::kRelease, "ell");
    }
  }
  for (uint32_t t = 0; t < d.num_threads; ++t)
    if (t != t_wbar && t != t_wbar_p) emit(t_wbar, Op::kRead, "p_" + tname[t]);
  emit(t_wbar, Op::kRead, "y");
  uint32_t ry_idx = emitted;

  RaceInstance out;
  out.trace = b.finish();
  if (!out.trace.well_formed())
    throw std::invalid_argument("instance shape unsupported: " +
                                out.trace.violations().front().rule);
  out.target = {wy_idx, ry_idx};
  return out;
}

}  // namespace sprace

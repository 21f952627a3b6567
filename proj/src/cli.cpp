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

#include "sprace/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>

#include "sprace/baselines.hpp"
#include "sprace/closure_ref.hpp"
#include "sprace/generators.hpp"
#include "sprace/oracle_bf.hpp"
#include "sprace/preprocess.hpp"
#include "sprace/report.hpp"
#include "sprace/rfposet.hpp"
#include "sprace/syncp.hpp"
#include "sprace/trace_io.hpp"

namespace sprace {

namespace {

int log_level() {
  static int level = [] {
    const char* env = std::getenv("RACE_LOG");
    if (!env) return 0;
    std::string v(env);
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::fprintf(stderr, "[debug] %s\n", msg.c_str());
}

struct SvHash {
  using is_transparent = void;
  size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  size_t operator()(const std::string& s) const { return std::hash<std::string_view>{}(s); }
};

struct Intern {
  std::unordered_map<std::string, uint32_t, SvHash, std::equal_to<>> map;
  std::vector<std::string> names;
  uint32_t get(std::string_view tok) {
    auto it = map.find(tok);
    if (it != map.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(names.size());
    names.emplace_back(tok);
    map.emplace(names.back(), id);
    return id;
  }
};

// Streaming well-formedness checks mirroring the trace model's rules, with
// O(threads + locks) state.
struct StreamValidator {
  std::vector<uint32_t> holder;       // per lock: thread + 1, 0 = free
  std::vector<uint8_t> forked, joined, started;

  void ensure(uint32_t t, uint32_t l) {
    if (t >= forked.size()) {
      forked.resize(t + 1, 0);
      joined.resize(t + 1, 0);
      started.resize(t + 1, 0);
    }
    if (l != UINT32_MAX && l >= holder.size()) holder.resize(l + 1, 0);
  }

  void check(Op op, uint32_t t, uint32_t target, uint64_t event_no) {
    ensure(t, is_sync(op) && op != Op::kFork && op != Op::kJoin ? target : UINT32_MAX);
    if (op == Op::kFork || op == Op::kJoin) ensure(target, UINT32_MAX);
    auto fail = [&](const std::string& rule) {
      throw ParseError("event " + std::to_string(event_no) + ": " + rule);
    };
    if (joined[t]) fail("event after join of its thread");
    started[t] = 1;
    switch (op) {
      case Op::kAcquire:
        if (holder[target] == t + 1) fail("reentrant acquire");
        if (holder[target] != 0) fail("acquire of held lock");
        holder[target] = t + 1;
        break;
      case Op::kRelease:
        if (holder[target] != t + 1) fail("release without matching acquire in thread");
        holder[target] = 0;
        break;
      case Op::kFork:
        if (target == t) fail("thread forks itself");
        if (forked[target]) fail("fork of already-forked thread");
        if (started[target]) fail("fork of already-started thread");
        forked[target] = 1;
        break;
      case Op::kJoin:
        if (target == t) fail("thread joins itself");
        if (joined[target]) fail("double join");
        joined[target] = 1;
        break;
      default:
        break;
    }
  }
};

struct ScanResult {
  Intern threads, locks, vars;
  uint64_t events = 0;
  uint64_t acquires = 0;
  std::vector<bool> ordered_vars;
  std::vector<uint64_t> accesses_per_var;
};

// Pass 1: intern tokens, validate, count, and run the ordered-variable scan.
ScanResult prescan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  ScanResult res;
  StreamValidator validator;
  std::vector<std::pair<Op, std::pair<uint32_t, uint32_t>>> buffered;
  // the ordered-variable scan needs final thread count, so buffer dense ops
  buffered.reserve(1 << 20);
  for_each_event_line(in, [&](const RawEvent& ev) {
    ++res.events;
    uint32_t t = res.threads.get(ev.thread);
    uint32_t tgt = 0;
    switch (ev.op) {
      case Op::kRead:
      case Op::kWrite: tgt = res.vars.get(ev.target); break;
      case Op::kAcquire:
      case Op::kRelease: tgt = res.locks.get(ev.target); break;
      case Op::kFork:
      case Op::kJoin: tgt = res.threads.get(ev.target); break;
    }
    if (ev.op == Op::kAcquire) ++res.acquires;
    validator.check(ev.op, t, tgt, res.events);
    buffered.emplace_back(ev.op, std::make_pair(t, tgt));
  });
  uint32_t nt = static_cast<uint32_t>(res.threads.names.size());
  uint32_t nv = static_cast<uint32_t>(res.vars.names.size());
  OrderedVarScan scan(nt, nv);
  res.accesses_per_var.assign(nv, 0);
  for (const auto& [op, tt] : buffered) {
    scan.on_event(op, tt.first, tt.second);
    if (is_access(op)) ++res.accesses_per_var[tt.second];
  }
  res.ordered_vars = scan.ordered();
  return res;
}

void write_output(const std::string& text, const std::string& out_path,
                  std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + out_path + " for writing");
    f << text;
  }
}

int cmd_detect(const std::vector<std::string>& inputs, const std::string& algo,
               const std::string& format_name, bool no_filter,
               const std::string& out_path, std::ostream& out) {
  ReportFormat format = ReportFormat::kText;
  if (format_name == "json") format = ReportFormat::kJson;
  else if (format_name == "csv") format = ReportFormat::kCsv;

  bool any_race = false;
  std::string all_text;
  for (const std::string& path : inputs) {
    auto t0 = std::chrono::steady_clock::now();
    ScanResult scan = prescan(path);
    uint32_t nt = static_cast<uint32_t>(scan.threads.names.size());
    uint32_t nl = static_cast<uint32_t>(scan.locks.names.size());
    uint32_t nv = static_cast<uint32_t>(scan.vars.names.size());
    bool filter = !no_filter;
    uint64_t dropped = 0;
    if (filter) {
      for (uint32_t v = 0; v < nv; ++v)
        if (scan.ordered_vars[v]) dropped += scan.accesses_per_var[v];
      log_info("filter drops " + std::to_string(dropped) + " events on " + path);
    }

    // pass 2: feed the detector, skipping accesses of ordered variables
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    Intern threads2, locks2, vars2;
    uint64_t event_no = 0;
    std::vector<RaceReport> reports;
    auto feed = [&](auto& detector) {
      for_each_event_line(in, [&](const RawEvent& ev) {
        ++event_no;
        uint32_t t = threads2.get(ev.thread);
        uint32_t tgt = 0;
        switch (ev.op) {
          case Op::kRead:
          case Op::kWrite: tgt = vars2.get(ev.target); break;
          case Op::kAcquire:
          case Op::kRelease: tgt = locks2.get(ev.target); break;
          case Op::kFork:
          case Op::kJoin: tgt = threads2.get(ev.target); break;
        }
        if (filter && is_access(ev.op) && scan.ordered_vars[tgt]) return;
        detector.on_event(ev.op, t, tgt, static_cast<uint32_t>(event_no), ev.loc);
      });
      reports = detector.take_reports();
    };
    if (algo == "syncp") {
      SyncPDetector d(nt, nl, nv);
      feed(d);
      log_debug("engine state " + std::to_string(d.state_bytes()) + " bytes");
    } else {
      HbDetector d(nt, nl, nv, algo == "shb");
      feed(d);
    }

    Summary summary = summarize(reports);
    auto t1 = std::chrono::steady_clock::now();
    summary.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    log_info(path + ": " + std::to_string(summary.racy_events) + " racy events in " +
             std::to_string(summary.wall_time_s) + "s");
    NameTables names{&scan.threads.names, &scan.vars.names};
    all_text += emit_report(algo, reports, summary, format, names);
    if (!reports.empty()) any_race = true;
  }
  write_output(all_text, out_path, out);
  return any_race ? 1 : 0;
}

int cmd_oracle(const std::string& path, const std::string& kind, const std::string& mode,
               uint32_t e1, uint32_t e2, uint32_t max_events, std::ostream& out) {
  Trace trace = parse_trace_file(path);
  BfLimits limits;
  limits.max_events = max_events;
  auto query = [&](uint32_t a, uint32_t b) {
    if (mode == "syncp") return is_syncp_race_pair(trace, a, b);
    if (mode == "general") return is_predictable_race_bf(trace, a, b, limits);
    return is_syncp_race_bf(trace, a, b, limits);  // syncp-enum
  };
  if (kind == "pair") {
    if (e1 == 0 || e2 == 0 || e1 >= e2 || e2 > trace.size())
      throw ParseError("need 1 <= e1 < e2 <= " + std::to_string(trace.size()));
    out << (query(e1, e2) ? "true" : "false") << "\n";
    return 0;
  }
  for (uint32_t b = 2; b <= trace.size(); ++b) {
    if (!is_access(trace.event(b).op)) continue;
    for (uint32_t a = 1; a < b; ++a) {
      if (!conflicting(trace.event(a), trace.event(b))) continue;
      out << a << ',' << b << ',' << (query(a, b) ? "true" : "false") << "\n";
    }
  }
  return 0;
}

int cmd_stats(const std::string& path, std::ostream& out) {
  ScanResult scan = prescan(path);
  out << "N=" << scan.events << " T=" << scan.threads.names.size()
      << " L=" << scan.locks.names.size() << " V=" << scan.vars.names.size()
      << " A=" << scan.acquires << "\n";
  uint64_t ordered = 0, dropped = 0;
  for (size_t v = 0; v < scan.ordered_vars.size(); ++v) {
    if (scan.ordered_vars[v]) {
      ++ordered;
      dropped += scan.accesses_per_var[v];
    }
  }
  out << "filter: ordered_vars=" << ordered << " dropped_events=" << dropped << "\n";
  for (size_t v = 0; v < scan.ordered_vars.size(); ++v)
    if (scan.ordered_vars[v])
      out << "filter: var " << scan.vars.names[v] << " dropped ("
          << scan.accesses_per_var[v] << " events)\n";
  return 0;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  Trace trace = parse_trace_lenient(in);
  if (trace.well_formed()) {
    out << "ok\n";
    return 0;
  }
  for (const Violation& v : trace.violations())
    out << "event " << v.idx << ": " << v.rule << "\n";
  return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sync-preserving data race analysis"};
  app.require_subcommand(1);

  // detect
  auto* detect = app.add_subcommand("detect", "run a race detector over trace files");
  std::vector<std::string> inputs;
  std::string algo = "syncp", format = "text", out_path;
  bool no_filter = false;
  detect->add_option("--input", inputs, "trace file(s)")->required();
  detect->add_option("--algo", algo, "detector")
      ->check(CLI::IsMember({"syncp", "shb", "hb"}));
  detect->add_option("--format", format, "report format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  detect->add_flag("--no-filter", no_filter, "disable the ordered-variable prefilter");
  detect->add_option("--out", out_path, "write the report here instead of stdout");

  // gen
  auto* gen = app.add_subcommand("gen", "generate traces");
  gen->require_subcommand(1);
  auto* gen_random = gen->add_subcommand("random", "seeded well-formed random trace");
  GenConfig cfg;
  std::string gen_out;
  gen_random->add_option("--events", cfg.events);
  gen_random->add_option("--threads", cfg.threads);
  gen_random->add_option("--locks", cfg.locks);
  gen_random->add_option("--vars", cfg.vars);
  gen_random->add_option("--seed", cfg.seed);
  gen_random->add_option("--p-read", cfg.p_read);
  gen_random->add_option("--p-write", cfg.p_write);
  gen_random->add_option("--p-sync", cfg.p_sync);
  gen_random->add_option("--out", gen_out);
  auto* gen_eq = gen->add_subcommand("equality", "two-thread bit-string equality trace");
  std::string ustr, vstr;
  gen_eq->add_option("--u", ustr)->required();
  gen_eq->add_option("--v", vstr)->required();
  gen_eq->add_option("--out", gen_out);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "brute-force and closure race queries");
  oracle->require_subcommand(1);
  std::string oracle_input, oracle_mode = "syncp";
  uint32_t oe1 = 0, oe2 = 0, max_events = 14;
  auto* oracle_pair = oracle->add_subcommand("pair", "query one conflicting pair");
  oracle_pair->add_option("--input", oracle_input)->required();
  oracle_pair->add_option("--e1", oe1)->required();
  oracle_pair->add_option("--e2", oe2)->required();
  oracle_pair->add_option("--mode", oracle_mode)
      ->check(CLI::IsMember({"syncp", "general", "syncp-enum"}));
  oracle_pair->add_option("--max-events", max_events);
  auto* oracle_all = oracle->add_subcommand("all", "query every conflicting pair");
  oracle_all->add_option("--input", oracle_input)->required();
  oracle_all->add_option("--mode", oracle_mode)
      ->check(CLI::IsMember({"syncp", "general", "syncp-enum"}));
  oracle_all->add_option("--max-events", max_events);

  // reduce
  auto* reduce = app.add_subcommand("reduce", "hardness-reduction constructions");
  reduce->require_subcommand(1);
  std::string reduce_input, reduce_out;
  auto* build_rev = reduce->add_subcommand(
      "build-reverse", "rf-poset -> reverse-realizability instance");
  build_rev->add_option("--input", reduce_input)->required();
  build_rev->add_option("--out", reduce_out);
  auto* to_trace = reduce->add_subcommand(
      "to-trace", "reverse instance -> race-prediction trace");
  to_trace->add_option("--input", reduce_input)->required();
  to_trace->add_option("--out", reduce_out);

  // validate / stats
  auto* validate_cmd = app.add_subcommand("validate", "check trace well-formedness");
  std::string plain_input;
  validate_cmd->add_option("--input", plain_input)->required();
  auto* stats_cmd = app.add_subcommand("stats", "trace dimensions and filter summary");
  stats_cmd->add_option("--input", plain_input)->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (detect->parsed())
      return cmd_detect(inputs, algo, format, no_filter, out_path, out);
    if (gen_random->parsed()) {
      Trace t = sprace::gen_random(cfg);
      write_output(emit_trace(t), gen_out, out);
      return 0;
    }
    if (gen_eq->parsed()) {
      Trace t = gen_equality(ustr, vstr);
      write_output(emit_trace(t), gen_out, out);
      return 0;
    }
    if (oracle_pair->parsed())
      return cmd_oracle(oracle_input, "pair", oracle_mode, oe1, oe2, max_events, out);
    if (oracle_all->parsed())
      return cmd_oracle(oracle_input, "all", oracle_mode, 0, 0, max_events, out);
    if (build_rev->parsed()) {
      RfPoset p = parse_rfposet_file(reduce_input);
      ReverseInstance inst = build_reverse_instance(p);
      write_output(emit_reverse_instance(inst), reduce_out, out);
      return 0;
    }
    if (to_trace->parsed()) {
      ReverseInstance inst = parse_reverse_instance_file(reduce_input);
      RaceInstance ri = build_race_instance(inst);
      std::string text = "# target " + std::to_string(ri.target.first) + " " +
                         std::to_string(ri.target.second) + "\n" + emit_trace(ri.trace);
      write_output(text, reduce_out, out);
      if (!reduce_out.empty())
        out << "target " << ri.target.first << " " << ri.target.second << "\n";
      return 0;
    }
    if (validate_cmd->parsed()) return cmd_validate(plain_input, out);
    if (stats_cmd->parsed()) return cmd_stats(plain_input, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no command\n";
  return 2;
}

}  // namespace sprace

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

#include "sprace/trace_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace sprace {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_op(std::string_view tok, Op& op) {
  if (tok == "r") op = Op::kRead;
  else if (tok == "w") op = Op::kWrite;
  else if (tok == "acq") op = Op::kAcquire;
  else if (tok == "rel") op = Op::kRelease;
  else if (tok == "fork") op = Op::kFork;
  else if (tok == "join") op = Op::kJoin;
  else return false;
  return true;
}

[[noreturn]] void fail_line(uint64_t line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

struct SvHash {
  using is_transparent = void;
  size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  size_t operator()(const std::string& s) const { return std::hash<std::string_view>{}(s); }
};

// Interning keyed by token with dense ids in first-appearance order.
struct FastIntern {
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

Trace parse_impl(std::istream& in, bool strict) {
  TraceBuilder b;
  FastIntern threads, locks, vars;
  for_each_event_line(in, [&](const RawEvent& ev) {
    uint32_t t = threads.get(ev.thread);
    uint32_t tgt = 0;
    switch (ev.op) {
      case Op::kRead:
      case Op::kWrite: tgt = vars.get(ev.target); break;
      case Op::kAcquire:
      case Op::kRelease: tgt = locks.get(ev.target); break;
      case Op::kFork:
      case Op::kJoin: tgt = threads.get(ev.target); break;
    }
    b.add_raw(t, ev.op, tgt, ev.loc);
  });
  for (const auto& name : threads.names) b.intern_thread(name);
  for (const auto& name : locks.names) b.intern_lock(name);
  for (const auto& name : vars.names) b.intern_var(name);
  Trace trace = b.finish();
  if (strict && !trace.well_formed()) {
    const Violation& v = trace.violations().front();
    throw ParseError("event " + std::to_string(v.idx) + ": " + v.rule);
  }
  return trace;
}

}  // namespace

void for_each_event_line(std::istream& in,
                         const std::function<void(const RawEvent&)>& fn) {
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = trim(line);
    if (s.empty() || s[0] == '#') continue;

    RawEvent ev;
    ev.line_no = line_no;
    ev.loc = -1;

    size_t p1 = s.find('|');
    if (p1 == std::string_view::npos) fail_line(line_no, "expected 'thread|op|target'");
    size_t p2 = s.find('|', p1 + 1);
    if (p2 == std::string_view::npos) fail_line(line_no, "expected 'thread|op|target'");
    size_t p3 = s.find('|', p2 + 1);

    ev.thread = trim(s.substr(0, p1));
    std::string_view op_tok = trim(s.substr(p1 + 1, p2 - p1 - 1));
    if (p3 == std::string_view::npos) {
      ev.target = trim(s.substr(p2 + 1));
    } else {
      ev.target = trim(s.substr(p2 + 1, p3 - p2 - 1));
      std::string_view loc_tok = trim(s.substr(p3 + 1));
      if (loc_tok.find('|') != std::string_view::npos)
        fail_line(line_no, "too many fields");
      long loc = -1;
      try {
        size_t pos = 0;
        loc = std::stol(std::string(loc_tok), &pos);
        if (pos != loc_tok.size()) throw std::invalid_argument("");
      } catch (...) {
        fail_line(line_no, "location must be a nonnegative integer");
      }
      if (loc < 0) fail_line(line_no, "location must be a nonnegative integer");
      ev.loc = static_cast<int32_t>(loc);
    }
    if (ev.thread.empty()) fail_line(line_no, "empty thread token");
    if (ev.target.empty()) fail_line(line_no, "empty target token");
    if (!parse_op(op_tok, ev.op))
      fail_line(line_no, "unknown op '" + std::string(op_tok) + "'");
    fn(ev);
  }
}

Trace parse_trace(std::istream& in) { return parse_impl(in, true); }

Trace parse_trace(const std::string& text) {
  std::istringstream in(text);
  return parse_impl(in, true);
}

Trace parse_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  return parse_impl(in, true);
}

Trace parse_trace_lenient(std::istream& in) { return parse_impl(in, false); }

void emit_trace(const Trace& trace, std::ostream& out) {
  for (uint32_t i = 1; i <= trace.size(); ++i) {
    const Event& e = trace.event(i);
    out << trace.thread_name(e.thread) << '|' << op_token(e.op) << '|';
    switch (e.op) {
      case Op::kRead:
      case Op::kWrite: out << trace.var_name(e.target); break;
      case Op::kAcquire:
      case Op::kRelease: out << trace.lock_name(e.target); break;
      case Op::kFork:
      case Op::kJoin: out << trace.thread_name(e.target); break;
    }
    if (e.loc >= 0) out << '|' << e.loc;
    out << '\n';
  }
}

std::string emit_trace(const Trace& trace) {
  std::ostringstream out;
  emit_trace(trace, out);
  return out.str();
}

namespace {

const std::string& thread_of(const NameTables& names, uint32_t t) {
  static const std::string unknown = "?";
  if (!names.threads || t >= names.threads->size()) return unknown;
  return (*names.threads)[t];
}

const std::string& var_of(const NameTables& names, uint32_t v) {
  static const std::string unknown = "?";
  if (!names.vars || v >= names.vars->size()) return unknown;
  return (*names.vars)[v];
}

std::string loc_str(int32_t loc) { return loc < 0 ? "-" : std::to_string(loc); }

}  // namespace

std::string emit_report(const std::string& algo, const std::vector<RaceReport>& reports,
                        const Summary& summary, ReportFormat format,
                        const NameTables& names) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::kText: {
      for (const RaceReport& r : reports) {
        out << "race e1=" << r.e1 << " e2=" << r.e2 << " var=" << var_of(names, r.var)
            << " threads=" << thread_of(names, r.t1) << ',' << thread_of(names, r.t2)
            << " kinds=" << op_token(r.k1) << ',' << op_token(r.k2)
            << " locs=" << loc_str(r.loc1) << ',' << loc_str(r.loc2) << '\n';
      }
      out << "summary racy_events=" << summary.racy_events
          << " racy_lines=" << summary.racy_lines << " racy_vars=" << summary.racy_vars
          << " max_distance=" << summary.max_distance << '\n';
      break;
    }
    case ReportFormat::kCsv: {
      out << "e1,e2,var,thread1,thread2,kind1,kind2,loc1,loc2\n";
      for (const RaceReport& r : reports) {
        out << r.e1 << ',' << r.e2 << ',' << var_of(names, r.var) << ','
            << thread_of(names, r.t1) << ',' << thread_of(names, r.t2) << ','
            << op_token(r.k1) << ',' << op_token(r.k2) << ','
            << (r.loc1 < 0 ? "" : std::to_string(r.loc1)) << ','
            << (r.loc2 < 0 ? "" : std::to_string(r.loc2)) << '\n';
      }
      break;
    }
    case ReportFormat::kJson: {
      ordered_json doc;
      doc["algo"] = algo;
      doc["races"] = ordered_json::array();
      for (const RaceReport& r : reports) {
        ordered_json jr;
        jr["e1"] = r.e1;
        jr["e2"] = r.e2;
        jr["var"] = var_of(names, r.var);
        jr["threads"] = {thread_of(names, r.t1), thread_of(names, r.t2)};
        jr["locs"] = ordered_json::array();
        jr["locs"].push_back(r.loc1 < 0 ? ordered_json(nullptr) : ordered_json(r.loc1));
        jr["locs"].push_back(r.loc2 < 0 ? ordered_json(nullptr) : ordered_json(r.loc2));
        doc["races"].push_back(std::move(jr));
      }
      doc["summary"] = {{"racy_events", summary.racy_events},
                        {"racy_lines", summary.racy_lines},
                        {"racy_vars", summary.racy_vars},
                        {"max_distance", summary.max_distance}};
      out << doc.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

namespace {

[[noreturn]] void fail_json(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

RfPoset rfposet_from_json(const ordered_json& doc) {
  RfPoset p;
  if (!doc.is_object()) fail_json("$", "expected object");
  if (!doc.contains("events") || !doc["events"].is_array())
    fail_json("$.events", "expected array");
  size_t i = 0;
  for (const auto& je : doc["events"]) {
    std::string path = "$.events[" + std::to_string(i++) + "]";
    if (!je.is_object()) fail_json(path, "expected object");
    RfEvent e;
    if (!je.contains("id") || !je["id"].is_number_unsigned())
      fail_json(path + ".id", "expected nonnegative integer");
    e.id = je["id"].get<uint32_t>();
    if (!je.contains("thread") || !je["thread"].is_string())
      fail_json(path + ".thread", "expected string");
    e.thread = je["thread"].get<std::string>();
    if (!je.contains("op") || !je["op"].is_string())
      fail_json(path + ".op", "expected \"r\" or \"w\"");
    std::string op = je["op"].get<std::string>();
    if (op != "r" && op != "w") fail_json(path + ".op", "expected \"r\" or \"w\"");
    e.is_write = op == "w";
    if (!je.contains("var") || !je["var"].is_string())
      fail_json(path + ".var", "expected string");
    e.var = je["var"].get<std::string>();
    p.events.push_back(std::move(e));
  }
  if (doc.contains("order")) {
    if (!doc["order"].is_array()) fail_json("$.order", "expected array");
    i = 0;
    for (const auto& jo : doc["order"]) {
      std::string path = "$.order[" + std::to_string(i++) + "]";
      if (!jo.is_array() || jo.size() != 2 || !jo[0].is_number_unsigned() ||
          !jo[1].is_number_unsigned())
        fail_json(path, "expected [fromId, toId]");
      p.edges.emplace_back(jo[0].get<uint32_t>(), jo[1].get<uint32_t>());
    }
  }
  if (doc.contains("rf")) {
    if (!doc["rf"].is_object()) fail_json("$.rf", "expected object");
    for (const auto& [key, val] : doc["rf"].items()) {
      uint32_t read_id;
      try {
        size_t pos = 0;
        read_id = static_cast<uint32_t>(std::stoul(key, &pos));
        if (pos != key.size()) throw std::invalid_argument("");
      } catch (...) {
        fail_json("$.rf." + key, "key must be a read id");
      }
      if (!val.is_number_unsigned()) fail_json("$.rf." + key, "expected write id");
      p.rf[read_id] = val.get<uint32_t>();
    }
  }
  if (doc.contains("distinguished") && !doc["distinguished"].is_null()) {
    const auto& jd = doc["distinguished"];
    if (!jd.is_array() || jd.size() != 3 || !jd[0].is_number_unsigned() ||
        !jd[1].is_number_unsigned() || !jd[2].is_number_unsigned())
      fail_json("$.distinguished", "expected [wId, rId, wPrimeId]");
    p.distinguished = {{jd[0].get<uint32_t>(), jd[1].get<uint32_t>(), jd[2].get<uint32_t>()}};
  }
  auto errs = validate_rfposet(p);
  if (!errs.empty()) fail_json("$", errs.front());
  return p;
}

ordered_json rfposet_to_json(const RfPoset& p) {
  ordered_json doc;
  doc["events"] = ordered_json::array();
  for (const RfEvent& e : p.events) {
    doc["events"].push_back({{"id", e.id},
                             {"thread", e.thread},
                             {"op", e.is_write ? "w" : "r"},
                             {"var", e.var}});
  }
  doc["order"] = ordered_json::array();
  for (const auto& [a, b] : p.edges) doc["order"].push_back({a, b});
  doc["rf"] = ordered_json::object();
  for (const auto& [r, w] : p.rf) doc["rf"][std::to_string(r)] = w;
  if (p.distinguished) {
    doc["distinguished"] = {(*p.distinguished)[0], (*p.distinguished)[1],
                            (*p.distinguished)[2]};
  } else {
    doc["distinguished"] = nullptr;
  }
  return doc;
}

ordered_json parse_json_text(const std::string& text) {
  ordered_json doc = ordered_json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("invalid JSON");
  return doc;
}

}  // namespace

RfPoset parse_rfposet(const std::string& text) {
  return rfposet_from_json(parse_json_text(text));
}

RfPoset parse_rfposet_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_rfposet(buf.str());
}

std::string emit_rfposet(const RfPoset& poset) {
  return rfposet_to_json(poset).dump(2) + "\n";
}

ReverseInstance parse_reverse_instance(const std::string& text) {
  ordered_json doc = parse_json_text(text);
  ReverseInstance inst;
  inst.poset = rfposet_from_json(doc);
  if (!inst.poset.distinguished)
    throw ParseError("$.distinguished: reverse instance requires a triplet");
  if (!doc.contains("witness") || !doc["witness"].is_array())
    throw ParseError("$.witness: expected array of event ids");
  for (const auto& j : doc["witness"]) {
    if (!j.is_number_unsigned()) throw ParseError("$.witness: expected event ids");
    inst.witness.push_back(j.get<uint32_t>());
  }
  if (inst.witness.size() != inst.poset.events.size())
    throw ParseError("$.witness: must linearize all events");
  return inst;
}

ReverseInstance parse_reverse_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_reverse_instance(buf.str());
}

std::string emit_reverse_instance(const ReverseInstance& inst) {
  ordered_json doc = rfposet_to_json(inst.poset);
  doc["witness"] = inst.witness;
  return doc.dump(2) + "\n";
}

}  // namespace sprace

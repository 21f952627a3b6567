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

#ifndef SPRACE_TRACE_IO_HPP_
#define SPRACE_TRACE_IO_HPP_

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sprace/report.hpp"
#include "sprace/rfposet.hpp"
#include "sprace/trace.hpp"

namespace sprace {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical trace format: `thread|op|target[|location]`, one event per line,
// LF endings, '#' comments and blank lines ignored. op is one of
// r, w, acq, rel, fork, join.
Trace parse_trace(std::istream& in);
Trace parse_trace(const std::string& text);
Trace parse_trace_file(const std::string& path);

// Parses without rejecting lock/fork violations, so `validate` can report
// them. Malformed lines still throw.
Trace parse_trace_lenient(std::istream& in);

// Single-pass line visitor used by the streaming detector paths; memory use
// is O(1) beyond the caller's own state.
struct RawEvent {
  std::string_view thread;
  Op op;
  std::string_view target;
  int32_t loc;
  uint64_t line_no;
};
void for_each_event_line(std::istream& in, const std::function<void(const RawEvent&)>& fn);

std::string emit_trace(const Trace& trace);
void emit_trace(const Trace& trace, std::ostream& out);

enum class ReportFormat { kText, kJson, kCsv };

// Names for resolving dense ids in reports; spans must outlive the call.
struct NameTables {
  const std::vector<std::string>* threads = nullptr;
  const std::vector<std::string>* vars = nullptr;
};

std::string emit_report(const std::string& algo, const std::vector<RaceReport>& reports,
                        const Summary& summary, ReportFormat format,
                        const NameTables& names);

RfPoset parse_rfposet(const std::string& text);
RfPoset parse_rfposet_file(const std::string& path);
std::string emit_rfposet(const RfPoset& poset);

ReverseInstance parse_reverse_instance(const std::string& text);
ReverseInstance parse_reverse_instance_file(const std::string& path);
std::string emit_reverse_instance(const ReverseInstance& inst);

}  // namespace sprace

#endif  // SPRACE_TRACE_IO_HPP_

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

#ifndef SPRACE_CLI_HPP_
#define SPRACE_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace sprace {

// Command-line entry point; returns the process exit code.
// detect: 0 = no race, 1 = race(s) found, 2 = error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sprace

#endif  // SPRACE_CLI_HPP_

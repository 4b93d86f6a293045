// Copyright 2026 The streamadapt Authors.
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

#ifndef STREAMADAPT_CLI_HPP_
#define STREAMADAPT_CLI_HPP_

#include <string>
#include <vector>

namespace streamadapt {

/// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric divergence.
int run_cli(int argc, const char* const* argv);

/// Convenience overload for tests; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace streamadapt

#endif  // STREAMADAPT_CLI_HPP_

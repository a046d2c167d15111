// Copyright 2026 The TextPGD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TEXTPGD_TOOLS_CLI_COMMANDS_H_
#define TEXTPGD_TOOLS_CLI_COMMANDS_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace textpgd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Runs the textpgd command line. args excludes the program name.
// Reports, results and checkpoints go to files; diagnostics go to err.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace textpgd::cli

#endif  // TEXTPGD_TOOLS_CLI_COMMANDS_H_

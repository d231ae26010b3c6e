// Copyright 2026 The spoofbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 success, 1 data/runtime failure,
// 2 usage failure. Failures print one JSON error record on stderr.

#ifndef SPOOFBENCH_CLI_H_
#define SPOOFBENCH_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spoofbench {

enum class LogLevel { kError, kWarn, kInfo, kDebug };

struct CliConfig {
  std::string subcommand;
  std::string manifest_path;
  std::string format;
  std::string output_path;
  std::optional<std::string> polarity;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  LogLevel log_level = LogLevel::kWarn;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsageError = 2;

/// args[0] is the program name. Reads DF_ARENA_JOBS for the --jobs default.
int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err);

/// "spoofbench X.Y.Z (manifest_version N, record_version N, ...)".
std::string VersionString();

}  // namespace spoofbench

#endif  // SPOOFBENCH_CLI_H_

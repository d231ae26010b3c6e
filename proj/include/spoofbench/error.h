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

#ifndef SPOOFBENCH_ERROR_H_
#define SPOOFBENCH_ERROR_H_

#include <stdexcept>
#include <string>

namespace spoofbench {

/// Bad input data: malformed files, contract violations in the data itself,
/// failed subprocesses. The CLI maps these to exit code 1.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &what) : std::runtime_error(what) {}
  DataError(const std::string &what, std::string path)
      : std::runtime_error(what), path_(std::move(path)) {}

  /// File the error refers to, empty when not file-specific.
  const std::string &path() const { return path_; }

 private:
  std::string path_;
};

/// Invalid configuration or arguments detected before any work is done.
/// The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string &what) : std::runtime_error(what) {}
};

/// Formats "path:line: message".
std::string AtLine(const std::string &path, std::size_t line,
                   const std::string &message);

}  // namespace spoofbench

#endif  // SPOOFBENCH_ERROR_H_

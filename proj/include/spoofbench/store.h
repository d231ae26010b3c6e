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

// Append-only run history: one JSON RunRecord per line.

#ifndef SPOOFBENCH_STORE_H_
#define SPOOFBENCH_STORE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "spoofbench/leaderboard.h"

namespace spoofbench {

struct CorruptEntry {
  std::uint64_t byte_offset = 0;
  std::size_t line = 0;
  std::string message;
};

struct StoreListing {
  std::vector<RunRecord> records;  // append order
  std::vector<CorruptEntry> corrupt;
};

/// Appends atomically (temp file + rename) under an advisory lock on
/// "<store>.lock". Throws DataError if the run_id is already present.
void StoreAppend(const std::string &store_path, const RunRecord &record);

/// Unreadable lines are reported, not fatal. A missing store lists empty.
StoreListing StoreList(const std::string &store_path);

}  // namespace spoofbench

#endif  // SPOOFBENCH_STORE_H_

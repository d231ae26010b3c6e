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

// Arena manifest: which datasets exist and which score file each system
// provides for each of them.
//
// Concrete syntax is JSON:
//
//   {
//     "manifest_version": 1,
//     "options": {
//       "default_polarity": "higher-is-bonafide",   // optional
//       "output_dir": "out",                        // optional
//       "join_mode": "strict",                      // optional
//       "allow_gaps": false                         // optional
//     },
//     "datasets": [
//       {"id": "asv19", "protocol": "keys/asv19.txt", "format": "asvspoof"}
//     ],
//     "systems": [
//       {"id": "sls", "params_m": 340.0, "category": "open-source",
//        "polarity": "higher-is-bonafide",
//        "scores": {"asv19": "scores/sls_asv19.txt"}}
//     ]
//   }
//
// Relative paths resolve against the manifest's directory. A system without
// "polarity" uses options.default_polarity; if neither is present loading
// fails.

#ifndef SPOOFBENCH_MANIFEST_H_
#define SPOOFBENCH_MANIFEST_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spoofbench/protocol.h"

namespace spoofbench {

inline constexpr int kManifestVersion = 1;

struct DatasetEntry {
  std::string id;
  std::string protocol_path;
  ProtocolFormat format = ProtocolFormat::kTwoColumn;
};

struct SystemEntry {
  std::string id;
  std::optional<double> param_count_millions;
  std::string category;  // free-form tag, e.g. "open-source", "proprietary"
  Polarity polarity = Polarity::kHigherIsBonafide;
  std::map<std::string, std::string> score_paths;  // dataset id -> path
};

struct ManifestOptions {
  std::optional<Polarity> default_polarity;
  std::string output_dir;
  JoinMode join_mode = JoinMode::kStrict;
  bool allow_gaps = false;
};

struct ArenaManifest {
  std::vector<DatasetEntry> datasets;
  std::vector<SystemEntry> systems;
  ManifestOptions options;
  std::string digest;  // sha256 hex of the manifest bytes, when loaded

  const DatasetEntry *FindDataset(const std::string &id) const;
};

/// Parses and validates manifest JSON. Relative paths are resolved against
/// base_dir. Throws ConfigError on any structural problem.
ArenaManifest ParseManifest(const std::string &text,
                            const std::string &base_dir);
ArenaManifest LoadManifest(const std::string &path);

/// Lowercase hex SHA-256.
std::string Sha256Hex(const std::string &bytes);

}  // namespace spoofbench

#endif  // SPOOFBENCH_MANIFEST_H_

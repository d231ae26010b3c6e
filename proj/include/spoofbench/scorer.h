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

// Adapter for detection systems that run as an external process.
//
// The command is run through /bin/sh. It receives newline-separated audio
// paths on stdin and must print one "path<TAB>score" line per input path on
// stdout; stderr is free-form and is captured for error messages.

#ifndef SPOOFBENCH_SCORER_H_
#define SPOOFBENCH_SCORER_H_

#include <string>
#include <vector>

#include "spoofbench/protocol.h"

namespace spoofbench {

struct ScorerRequest {
  std::string command;
  std::vector<std::string> audio_paths;
  double timeout_seconds = 600.0;
  std::string system_id;
  std::string dataset_id;
  Polarity polarity = Polarity::kHigherIsBonafide;
};

/// Scores are keyed by the basename-without-extension of each audio path.
/// Throws DataError on nonzero exit, timeout, malformed or incomplete output.
ScoreSet RunExternalScorer(const ScorerRequest &request);

/// Reads an audio list file (one path per line, blank and '#' lines skipped).
std::vector<std::string> ReadAudioList(const std::string &path);

}  // namespace spoofbench

#endif  // SPOOFBENCH_SCORER_H_

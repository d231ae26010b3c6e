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

// Protocol (ground-truth) files, score files and the join between them.

#ifndef SPOOFBENCH_PROTOCOL_H_
#define SPOOFBENCH_PROTOCOL_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace spoofbench {

enum class Label { kBonafide, kSpoof };

/// Orientation of a system's raw scores.
enum class Polarity { kHigherIsBonafide, kHigherIsSpoof };

enum class ProtocolFormat {
  kTwoColumn,  // "trial_id label"
  kAsvspoof,   // "speaker trial_id <field> attack label" (ASVspoof key files)
};

enum class JoinMode { kStrict, kIntersect };

const char *ToString(Label label);
const char *ToString(Polarity polarity);
const char *ToString(ProtocolFormat format);
const char *ToString(JoinMode mode);
Polarity ParsePolarity(std::string_view text);
ProtocolFormat ParseProtocolFormat(std::string_view text);
JoinMode ParseJoinMode(std::string_view text);

/// Maps label tokens found in the wild ("genuine", "fake", "1", ...) onto
/// the two canonical labels. Matching is case-insensitive.
class LabelAliases {
 public:
  /// bonafide/bona-fide/genuine/real/human/target/1 and
  /// spoof/spoofed/fake/deepfake/synthetic/nontarget/0.
  static LabelAliases Default();

  void Add(std::string_view token, Label label);
  std::optional<Label> Lookup(std::string_view token) const;

 private:
  std::unordered_map<std::string, Label> table_;
};

struct Trial {
  std::string id;
  Label label;
  std::optional<std::string> attack;

  bool operator==(const Trial &) const = default;
};

/// A dataset's evaluation protocol. Trial ids are unique and both classes are
/// present; the constructor enforces this.
class TrialSet {
 public:
  TrialSet(std::string dataset_id, std::vector<Trial> trials);

  const std::string &dataset_id() const { return dataset_id_; }
  const std::vector<Trial> &trials() const { return trials_; }
  std::size_t size() const { return trials_.size(); }
  std::size_t CountLabel(Label label) const;
  /// Index into trials(), or nullopt.
  std::optional<std::size_t> Find(std::string_view trial_id) const;

 private:
  std::string dataset_id_;
  std::vector<Trial> trials_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One system's scores on one dataset. Every score is finite; ids unique.
class ScoreSet {
 public:
  struct Entry {
    std::string trial_id;
    double score;
  };

  ScoreSet(std::string system_id, std::string dataset_id, Polarity polarity,
           std::vector<Entry> entries);

  const std::string &system_id() const { return system_id_; }
  const std::string &dataset_id() const { return dataset_id_; }
  Polarity polarity() const { return polarity_; }
  /// In file order.
  const std::vector<Entry> &entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::optional<double> Lookup(std::string_view trial_id) const;

 private:
  std::string system_id_;
  std::string dataset_id_;
  Polarity polarity_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct ScoredTrial {
  Label label;
  double score;  // always higher-is-bonafide

  bool operator==(const ScoredTrial &) const = default;
};

struct JoinResult {
  std::vector<ScoredTrial> rows;  // in protocol order
  std::size_t dropped_trials = 0;  // trials without a score (intersect mode)
  std::size_t dropped_scores = 0;  // scores without a trial (intersect mode)
};

TrialSet ParseProtocol(const std::string &path, ProtocolFormat format,
                       const LabelAliases &aliases = LabelAliases::Default(),
                       std::string dataset_id = {});
TrialSet ParseProtocolText(std::string_view text, ProtocolFormat format,
                           const LabelAliases &aliases,
                           std::string dataset_id,
                           const std::string &source_name = "<memory>");
/// Two-column form, one "trial_id label" line per trial.
std::string SerializeProtocol(const TrialSet &trials);

ScoreSet ParseScores(const std::string &path, Polarity polarity,
                     std::string system_id = {}, std::string dataset_id = {});
ScoreSet ParseScoresText(std::string_view text, Polarity polarity,
                         std::string system_id, std::string dataset_id,
                         const std::string &source_name = "<memory>");
std::string SerializeScores(const ScoreSet &scores);

/// Pairs each trial with its score. Strict mode requires identical key sets
/// and reports up to 10 missing and 10 extra ids on failure. Scores of a
/// higher-is-spoof system are negated.
JoinResult Join(const TrialSet &trials, const ScoreSet &scores, JoinMode mode);

/// "dir/LA_E_001.flac" -> "LA_E_001".
std::string TrialIdFromPath(std::string_view path);

}  // namespace spoofbench

#endif  // SPOOFBENCH_PROTOCOL_H_

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

// Arena evaluation, ranking and report emission.

#ifndef SPOOFBENCH_LEADERBOARD_H_
#define SPOOFBENCH_LEADERBOARD_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "spoofbench/manifest.h"
#include "spoofbench/metrics.h"
#include "spoofbench/stats.h"

namespace spoofbench {

inline constexpr int kRecordVersion = 1;

struct SystemSummary {
  std::string system_id;
  std::string category;
  std::optional<double> param_count_millions;
  double average_eer = 0.0;
  /// Empty when the system has missing datasets (allow_gaps).
  std::optional<double> pooled_eer;
  std::map<std::string, double> per_dataset_eer;
  std::optional<double> average_auc;
  std::vector<std::string> missing_datasets;

  bool operator==(const SystemSummary &) const = default;
};

/// Builds a summary from known per-dataset EERs; average_eer is their mean.
SystemSummary SummarizeEers(std::string system_id,
                            std::map<std::string, double> per_dataset_eer,
                            std::optional<double> pooled_eer = std::nullopt);

struct RunRecord {
  std::string run_id;
  std::string timestamp;  // ISO 8601, UTC
  std::string manifest_digest;
  std::string tool_version;
  std::vector<std::string> dataset_ids;
  std::vector<EvalReport> reports;  // system-major, manifest order
  std::vector<SystemSummary> summaries;
  std::vector<std::string> notes;

  bool operator==(const RunRecord &) const = default;
};

struct EvaluateOptions {
  unsigned jobs = 1;
  std::optional<JoinMode> join_mode;      // overrides the manifest
  std::optional<bool> allow_gaps;         // overrides the manifest
  std::optional<Polarity> polarity;       // overrides every system
  std::optional<double> decision_threshold;
};

/// Joins and evaluates every (system, dataset) pair, then summarises each
/// system with its average and pooled EER. Errors carry the pair they
/// arose from.
RunRecord EvaluateArena(const ArenaManifest &manifest,
                        const EvaluateOptions &options);

enum class RankKey { kPooledEer, kAverageEer };
RankKey ParseRankKey(std::string_view text);

/// Ascending by key, then by the other EER, then by system id. Systems
/// without a pooled EER sort after those with one.
std::vector<SystemSummary> Rank(std::vector<SystemSummary> summaries, RankKey key);

enum class ReportFormat { kMarkdown, kCsv, kJson };
ReportFormat ParseReportFormat(std::string_view text);

/// Markdown: EER grid in percent (2 decimals, round-half-even) with Average
/// and Pooled columns and the best value of each column in bold. CSV and
/// JSON keep full precision. Rows follow record.summaries order.
std::string Emit(const RunRecord &record, ReportFormat format);

/// "13.85" for 0.13845...; ties at the last digit round to even.
std::string FormatPercent(double fraction);

/// Dense grid of the summaries' per-dataset EERs. Throws DataError if any
/// summary has gaps.
EerMatrix ToEerMatrix(const RunRecord &record);

/// Fresh "run-<utc>-<random>" id and timestamp.
void StampRun(RunRecord &record);

void to_json(nlohmann::json &j, const SystemSummary &s);
void from_json(const nlohmann::json &j, SystemSummary &s);
void to_json(nlohmann::json &j, const RunRecord &r);
void from_json(const nlohmann::json &j, RunRecord &r);

}  // namespace spoofbench

#endif  // SPOOFBENCH_LEADERBOARD_H_

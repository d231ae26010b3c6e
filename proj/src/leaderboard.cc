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

#include "spoofbench/leaderboard.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <random>
#include <sstream>

#include "spoofbench/error.h"
#include "spoofbench/parallel.h"

namespace spoofbench {

using nlohmann::json;

namespace {

std::string FullPrecision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvField(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string EscapeMarkdown(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '|' || c == '*' || c == '_') out += '\\';
    out += c;
  }
  return out;
}

template <typename T>
json OptionalJson(const std::optional<T> &v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> OptionalFrom(const json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

std::string MarkdownTable(const RunRecord &record) {
  const auto &datasets = record.dataset_ids;
  const std::size_t cols = datasets.size() + 2;
  const auto &rows = record.summaries;

  // cells[r][c]: value of row r, column c (datasets..., average, pooled).
  std::vector<std::vector<std::optional<double>>> cells(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto &d : datasets) {
      auto it = rows[r].per_dataset_eer.find(d);
      cells[r].push_back(it == rows[r].per_dataset_eer.end()
                             ? std::nullopt
                             : std::optional<double>(it->second));
    }
    cells[r].push_back(rows[r].average_eer);
    cells[r].push_back(rows[r].pooled_eer);
  }
  std::vector<std::string> best(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    std::optional<double> lo;
    for (const auto &row : cells)
      if (row[c] && (!lo || *row[c] < *lo)) lo = row[c];
    if (lo) best[c] = FormatPercent(*lo);
  }

  std::ostringstream out;
  out << "| System |";
  for (const auto &d : datasets) out << ' ' << EscapeMarkdown(d) << " |";
  out << " Average | Pooled |\n|---|";
  for (std::size_t c = 0; c < cols; ++c) out << "---:|";
  out << '\n';
  bool any_gaps = false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << "| " << EscapeMarkdown(rows[r].system_id);
    if (!rows[r].missing_datasets.empty()) {
      out << " \xE2\x80\xA0";  // dagger
      any_gaps = true;
    }
    out << " |";
    for (std::size_t c = 0; c < cols; ++c) {
      if (!cells[r][c]) {
        out << " - |";
        continue;
      }
      std::string text = FormatPercent(*cells[r][c]);
      if (text == best[c]) text = "**" + text + "**";
      out << ' ' << text << " |";
    }
    out << '\n';
  }
  out << "\nEER (%). Average is the mean over datasets; Pooled is the EER of all "
         "scores under one global threshold.\n";
  if (any_gaps)
    out << "\n\xE2\x80\xA0 Missing datasets; average over the available ones, "
           "excluded from pooled EER.\n";
  for (const auto &note : record.notes) out << "\n- " << note;
  if (!record.notes.empty()) out << '\n';
  return out.str();
}

std::string CsvTable(const RunRecord &record) {
  std::ostringstream out;
  out << "system_id,params_m";
  for (const auto &d : record.dataset_ids) out << ',' << CsvField(d);
  out << ",average_eer,pooled_eer\n";
  for (const auto &s : record.summaries) {
    out << CsvField(s.system_id) << ',';
    if (s.param_count_millions) out << FullPrecision(*s.param_count_millions);
    for (const auto &d : record.dataset_ids) {
      out << ',';
      auto it = s.per_dataset_eer.find(d);
      if (it != s.per_dataset_eer.end()) out << FullPrecision(it->second);
    }
    out << ',' << FullPrecision(s.average_eer) << ',';
    if (s.pooled_eer) out << FullPrecision(*s.pooled_eer);
    out << '\n';
  }
  return out.str();
}

}  // namespace

SystemSummary SummarizeEers(std::string system_id,
                            std::map<std::string, double> per_dataset_eer,
                            std::optional<double> pooled_eer) {
  if (per_dataset_eer.empty())
    throw DataError("system '" + system_id + "' has no dataset EERs");
  SystemSummary s;
  s.system_id = std::move(system_id);
  double sum = 0.0;
  for (const auto &[dataset, eer] : per_dataset_eer) sum += eer;
  s.average_eer = sum / static_cast<double>(per_dataset_eer.size());
  s.per_dataset_eer = std::move(per_dataset_eer);
  s.pooled_eer = pooled_eer;
  return s;
}

RunRecord EvaluateArena(const ArenaManifest &manifest,
                        const EvaluateOptions &options) {
  const JoinMode mode = options.join_mode.value_or(manifest.options.join_mode);
  const bool allow_gaps = options.allow_gaps.value_or(manifest.options.allow_gaps);

  std::vector<std::optional<TrialSet>> protocols(manifest.datasets.size());
  ParallelFor(manifest.datasets.size(), options.jobs, [&](std::size_t d) {
    const auto &ds = manifest.datasets[d];
    try {
      protocols[d] = ParseProtocol(ds.protocol_path, ds.format,
                                   LabelAliases::Default(), ds.id);
    } catch (const DataError &e) {
      throw DataError("[dataset=" + ds.id + "] " + e.what(), e.path());
    }
  });

  struct Task {
    std::size_t system;
    std::size_t dataset;
    std::string score_path;
  };
  std::vector<Task> tasks;
  std::vector<std::vector<std::string>> missing(manifest.systems.size());
  for (std::size_t s = 0; s < manifest.systems.size(); ++s) {
    const auto &sys = manifest.systems[s];
    for (std::size_t d = 0; d < manifest.datasets.size(); ++d) {
      const auto &ds = manifest.datasets[d];
      auto it = sys.score_paths.find(ds.id);
      if (it != sys.score_paths.end()) {
        tasks.push_back({s, d, it->second});
      } else if (allow_gaps) {
        missing[s].push_back(ds.id);
      } else {
        throw DataError("[system=" + sys.id + " dataset=" + ds.id +
                        "] no score file and gaps are not allowed");
      }
    }
    if (missing[s].size() == manifest.datasets.size())
      throw DataError("[system=" + sys.id + "] has no score files at all");
  }

  std::vector<JoinResult> joined(tasks.size());
  std::vector<EvalReport> reports(tasks.size());
  ParallelFor(tasks.size(), options.jobs, [&](std::size_t t) {
    const Task &task = tasks[t];
    const auto &sys = manifest.systems[task.system];
    const auto &ds = manifest.datasets[task.dataset];
    try {
      ScoreSet scores = ParseScores(task.score_path,
                                    options.polarity.value_or(sys.polarity),
                                    sys.id, ds.id);
      joined[t] = Join(*protocols[task.dataset], scores, mode);
      reports[t] = Evaluate(sys.id, ds.id, joined[t].rows,
                            options.decision_threshold);
    } catch (const DataError &e) {
      throw DataError("[system=" + sys.id + " dataset=" + ds.id + "] " + e.what(),
                      e.path());
    }
  });

  RunRecord record;
  record.manifest_digest = manifest.digest;
  record.tool_version = SPOOFBENCH_VERSION;
  for (const auto &ds : manifest.datasets) record.dataset_ids.push_back(ds.id);
  record.reports = reports;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto &j = joined[t];
    if (j.dropped_trials || j.dropped_scores)
      record.notes.push_back(
          "system " + manifest.systems[tasks[t].system].id + ", dataset " +
          manifest.datasets[tasks[t].dataset].id + ": " +
          std::to_string(j.dropped_trials) + " trials without scores and " +
          std::to_string(j.dropped_scores) + " scores without trials dropped");
  }

  std::size_t t = 0;
  for (std::size_t s = 0; s < manifest.systems.size(); ++s) {
    const auto &sys = manifest.systems[s];
    std::map<std::string, double> eers;
    std::vector<std::span<const ScoredTrial>> sets;
    double auc_sum = 0.0;
    std::size_t first = t;
    for (; t < tasks.size() && tasks[t].system == s; ++t) {
      eers[reports[t].dataset_id] = reports[t].eer;
      auc_sum += reports[t].auc;
      sets.emplace_back(joined[t].rows);
    }
    std::optional<double> pooled;
    if (missing[s].empty()) {
      try {
        pooled = PooledEer(sets).eer;
      } catch (const DataError &e) {
        throw DataError("[system=" + sys.id + "] pooled EER: " + e.what());
      }
    }
    // Average in manifest dataset order rather than map order.
    double sum = 0.0;
    for (std::size_t k = first; k < t; ++k) sum += reports[k].eer;
    SystemSummary summary;
    summary.system_id = sys.id;
    summary.category = sys.category;
    summary.param_count_millions = sys.param_count_millions;
    summary.average_eer = sum / static_cast<double>(t - first);
    summary.pooled_eer = pooled;
    summary.per_dataset_eer = std::move(eers);
    summary.average_auc = auc_sum / static_cast<double>(t - first);
    summary.missing_datasets = missing[s];
    record.summaries.push_back(std::move(summary));
    for (std::size_t k = first; k < t; ++k) {
      joined[k].rows.clear();
      joined[k].rows.shrink_to_fit();
    }
  }
  return record;
}

RankKey ParseRankKey(std::string_view text) {
  if (text == "pooled_eer") return RankKey::kPooledEer;
  if (text == "average_eer") return RankKey::kAverageEer;
  throw ConfigError("unknown sort key '" + std::string(text) +
                    "' (expected pooled_eer or average_eer)");
}

std::vector<SystemSummary> Rank(std::vector<SystemSummary> summaries, RankKey key) {
  constexpr double kMissing = std::numeric_limits<double>::infinity();
  auto pooled = [&](const SystemSummary &s) { return s.pooled_eer.value_or(kMissing); };
  std::sort(summaries.begin(), summaries.end(),
            [&](const SystemSummary &a, const SystemSummary &b) {
              const double pa = pooled(a), pb = pooled(b);
              const double aa = a.average_eer, ab = b.average_eer;
              if (key == RankKey::kPooledEer) {
                if (pa != pb) return pa < pb;
                if (aa != ab) return aa < ab;
              } else {
                if (aa != ab) return aa < ab;
                if (pa != pb) return pa < pb;
              }
              return a.system_id < b.system_id;
            });
  return summaries;
}

ReportFormat ParseReportFormat(std::string_view text) {
  if (text == "markdown") return ReportFormat::kMarkdown;
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "json") return ReportFormat::kJson;
  throw ConfigError("unknown report format '" + std::string(text) +
                    "' (expected markdown, csv or json)");
}

std::string FormatPercent(double fraction) {
  // nearbyint follows the current rounding mode, round-half-even by default.
  const double hundredths = std::nearbyint(fraction * 1e4);
  const bool negative = hundredths < 0;
  const auto cents = static_cast<long long>(std::abs(hundredths));
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", negative ? "-" : "",
                cents / 100, cents % 100);
  return buf;
}

std::string Emit(const RunRecord &record, ReportFormat format) {
  switch (format) {
    case ReportFormat::kMarkdown: return MarkdownTable(record);
    case ReportFormat::kCsv: return CsvTable(record);
    case ReportFormat::kJson: return json(record).dump(2) + "\n";
  }
  throw ConfigError("unknown report format");
}

EerMatrix ToEerMatrix(const RunRecord &record) {
  std::vector<std::string> systems;
  std::vector<std::vector<double>> values;
  for (const auto &s : record.summaries) {
    if (!s.missing_datasets.empty())
      throw DataError("system '" + s.system_id + "' has missing datasets");
    std::vector<double> row;
    for (const auto &d : record.dataset_ids) row.push_back(s.per_dataset_eer.at(d));
    systems.push_back(s.system_id);
    values.push_back(std::move(row));
  }
  return EerMatrix(std::move(systems), record.dataset_ids, std::move(values));
}

void StampRun(RunRecord &record) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&secs, &utc);
  char stamp[32], compact[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
  std::strftime(compact, sizeof(compact), "%Y%m%dT%H%M%SZ", &utc);
  std::random_device rd;
  const std::uint64_t nonce = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  char id[96];
  std::snprintf(id, sizeof(id), "run-%s-%016llx", compact,
                static_cast<unsigned long long>(nonce));
  record.run_id = id;
  record.timestamp = stamp;
}

void to_json(json &j, const SystemSummary &s) {
  j = json{{"system_id", s.system_id},
           {"category", s.category},
           {"param_count_millions", OptionalJson(s.param_count_millions)},
           {"average_eer", s.average_eer},
           {"pooled_eer", OptionalJson(s.pooled_eer)},
           {"per_dataset_eer", s.per_dataset_eer},
           {"average_auc", OptionalJson(s.average_auc)},
           {"missing_datasets", s.missing_datasets}};
}

void from_json(const json &j, SystemSummary &s) {
  j.at("system_id").get_to(s.system_id);
  s.category = j.value("category", std::string());
  s.param_count_millions = OptionalFrom<double>(j, "param_count_millions");
  j.at("average_eer").get_to(s.average_eer);
  s.pooled_eer = OptionalFrom<double>(j, "pooled_eer");
  j.at("per_dataset_eer").get_to(s.per_dataset_eer);
  s.average_auc = OptionalFrom<double>(j, "average_auc");
  s.missing_datasets =
      j.value("missing_datasets", std::vector<std::string>());
}

void to_json(json &j, const RunRecord &r) {
  j = json{{"record_version", kRecordVersion},
           {"run_id", r.run_id},
           {"timestamp", r.timestamp},
           {"manifest_digest", r.manifest_digest},
           {"tool_version", r.tool_version},
           {"dataset_ids", r.dataset_ids},
           {"reports", r.reports},
           {"summaries", r.summaries},
           {"notes", r.notes}};
}

void from_json(const json &j, RunRecord &r) {
  const int version = j.at("record_version").get<int>();
  if (version != kRecordVersion)
    throw DataError("unsupported record_version " + std::to_string(version));
  j.at("run_id").get_to(r.run_id);
  j.at("timestamp").get_to(r.timestamp);
  j.at("manifest_digest").get_to(r.manifest_digest);
  j.at("tool_version").get_to(r.tool_version);
  j.at("dataset_ids").get_to(r.dataset_ids);
  j.at("reports").get_to(r.reports);
  j.at("summaries").get_to(r.summaries);
  r.notes = j.value("notes", std::vector<std::string>());
}

}  // namespace spoofbench

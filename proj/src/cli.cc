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

#include "spoofbench/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "spoofbench/augment.h"
#include "spoofbench/error.h"
#include "spoofbench/leaderboard.h"
#include "spoofbench/manifest.h"
#include "spoofbench/metrics.h"
#include "spoofbench/protocol.h"
#include "spoofbench/scorer.h"
#include "spoofbench/stats.h"
#include "spoofbench/store.h"

namespace spoofbench {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class Logger {
 public:
  Logger(std::ostream &err, LogLevel level) : err_(err), level_(level) {}
  void Log(LogLevel level, const std::string &msg) const {
    static const char *kNames[] = {"error", "warn", "info", "debug"};
    if (static_cast<int>(level) <= static_cast<int>(level_))
      err_ << "[" << kNames[static_cast<int>(level)] << "] " << msg << '\n';
  }
  void Info(const std::string &msg) const { Log(LogLevel::kInfo, msg); }
  void Warn(const std::string &msg) const { Log(LogLevel::kWarn, msg); }

 private:
  std::ostream &err_;
  LogLevel level_;
};

void ErrorRecord(std::ostream &err, const char *kind, const std::string &message,
                 const std::string &path = {}) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  if (!path.empty()) j["path"] = path;
  err << j.dump() << '\n';
}

// Writes to `path`, or to `out` when path is empty.
void Deliver(const std::string &text, const std::string &path, std::ostream &out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path, path);
  f << text;
  if (!f) throw DataError("short write to " + path, path);
}

std::string ReadText(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> SplitCommaList(const std::string &s) {
  std::vector<std::string> items;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) items.push_back(item);
  return items;
}

unsigned DefaultJobs() {
  const char *env = std::getenv("DF_ARENA_JOBS");
  if (!env || !*env) return 1;
  char *end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096)
    throw ConfigError("DF_ARENA_JOBS must be a positive integer, got '" +
                      std::string(env) + "'");
  return static_cast<unsigned>(v);
}

LogLevel ParseLogLevel(const std::string &s) {
  if (s == "error") return LogLevel::kError;
  if (s == "warn") return LogLevel::kWarn;
  if (s == "info") return LogLevel::kInfo;
  if (s == "debug") return LogLevel::kDebug;
  throw ConfigError("unknown log level '" + s + "'");
}

struct EvalFlags {
  std::vector<std::string> protocols;
  std::vector<std::string> scores;
  std::string protocol_format = "two-column";
  std::string join = "strict";
  std::optional<double> threshold;
  std::string system_id = "system";
  std::string dataset_id;
};

struct CorrelateFlags {
  std::string matrix;
  std::size_t bins = 0;
  std::string systems;
};

struct AugmentFlags {
  std::string in_dir, out_dir, category, source;
  std::optional<double> snr_low, snr_high;
  std::string clip = "peak-normalize";
};

struct LeaderboardFlags {
  std::string sort = "pooled_eer";
  std::string store;
  bool allow_gaps = false;
  std::optional<std::string> join;
  std::optional<double> threshold;
};

struct ScoreFlags {
  std::string command;
  std::string list;
  double timeout = 600.0;
  std::string system_id = "system";
  std::string dataset_id;
};

int CmdEval(const CliConfig &cfg, const EvalFlags &f, std::ostream &out) {
  const Polarity polarity = ParsePolarity(cfg.polarity.value_or("higher-is-bonafide"));
  const ProtocolFormat format = ParseProtocolFormat(f.protocol_format);
  const JoinMode mode = ParseJoinMode(f.join);
  TrialSet trials = ParseProtocol(f.protocols.at(0), format, LabelAliases::Default(),
                                  f.dataset_id);
  ScoreSet scores = ParseScores(f.scores.at(0), polarity, f.system_id,
                                trials.dataset_id());
  JoinResult joined = Join(trials, scores, mode);
  EvalReport report = Evaluate(f.system_id, trials.dataset_id(), joined.rows,
                               f.threshold);
  Deliver(json(report).dump(2) + "\n", cfg.output_path, out);
  return kExitOk;
}

int CmdPool(const CliConfig &cfg, const EvalFlags &f, std::ostream &out) {
  if (f.protocols.size() != f.scores.size())
    throw ConfigError("pool needs one --scores per --protocol");
  const Polarity polarity = ParsePolarity(cfg.polarity.value_or("higher-is-bonafide"));
  const ProtocolFormat format = ParseProtocolFormat(f.protocol_format);
  const JoinMode mode = ParseJoinMode(f.join);
  std::vector<JoinResult> joined;
  std::vector<EvalReport> reports;
  for (std::size_t i = 0; i < f.protocols.size(); ++i) {
    TrialSet trials = ParseProtocol(f.protocols[i], format);
    ScoreSet scores = ParseScores(f.scores[i], polarity, f.system_id,
                                  trials.dataset_id());
    joined.push_back(Join(trials, scores, mode));
    reports.push_back(Evaluate(f.system_id, trials.dataset_id(),
                               joined.back().rows, f.threshold));
  }
  std::vector<std::span<const ScoredTrial>> sets(joined.size());
  for (std::size_t i = 0; i < joined.size(); ++i) sets[i] = joined[i].rows;
  OperatingPoint pooled = PooledEer(sets);
  double sum = 0.0;
  std::size_t nb = 0, ns = 0;
  for (const auto &r : reports) {
    sum += r.eer;
    nb += r.n_bonafide;
    ns += r.n_spoof;
  }
  json j;
  j["system_id"] = f.system_id;
  j["pooled_eer"] = pooled.eer;
  j["pooled_threshold"] = pooled.threshold;
  j["average_eer"] = sum / static_cast<double>(reports.size());
  j["n_bonafide"] = nb;
  j["n_spoof"] = ns;
  j["reports"] = reports;
  Deliver(j.dump(2) + "\n", cfg.output_path, out);
  return kExitOk;
}

int CmdCorrelate(const CliConfig &cfg, const CorrelateFlags &f, std::ostream &out) {
  const std::string format = cfg.format.empty() ? "csv" : cfg.format;
  if (format != "csv" && format != "json")
    throw ConfigError("correlate supports --format csv or json");
  EerMatrix m = ParseEerMatrixCsv(ReadText(f.matrix), f.matrix);
  if (!f.systems.empty()) m = m.SelectSystems(SplitCommaList(f.systems));
  CorrelationReport report = CorrelateMatrix(m, f.bins, cfg.jobs);
  Deliver(format == "csv" ? CorrelationReportCsv(report) : CorrelationReportJson(report),
          cfg.output_path, out);
  return kExitOk;
}

int CmdAugment(const CliConfig &cfg, const AugmentFlags &f, std::ostream &out,
               const Logger &log) {
  AugmentSpec spec;
  spec.category = ParseAugmentCategory(f.category);
  spec.source_dir = f.source;
  spec.seed = cfg.seed;
  spec.clip_policy = ParseClipPolicy(f.clip);
  if (f.snr_low || f.snr_high) {
    if (spec.category == AugmentCategory::kReverb)
      throw ConfigError("--snr-low/--snr-high do not apply to reverb");
    SnrRange range = *DefaultSnrRange(spec.category);
    if (f.snr_low) range.low_db = *f.snr_low;
    if (f.snr_high) range.high_db = *f.snr_high;
    spec.snr_range = range;
  }
  spec.Validate();
  AugmentSummary summary = AugmentCorpus(f.in_dir, f.out_dir, spec, cfg.jobs);
  ordered_json files = ordered_json::array();
  for (const auto &rec : summary.records) {
    ordered_json r;
    r["input"] = rec.input;
    r["status"] = rec.ok() ? "ok" : "error";
    if (rec.snr_db) r["snr_db"] = *rec.snr_db;
    if (rec.realized_snr_db) r["realized_snr_db"] = *rec.realized_snr_db;
    if (rec.rir_id) r["rir_id"] = *rec.rir_id;
    if (!rec.ok()) {
      r["error"] = rec.error;
      log.Warn(rec.input + ": " + rec.error);
    }
    files.push_back(std::move(r));
  }
  ordered_json j;
  j["category"] = ToString(spec.category);
  j["processed"] = summary.processed;
  j["failures"] = summary.failures;
  j["manifest"] = summary.manifest_path;
  j["files"] = std::move(files);
  Deliver(j.dump(2) + "\n", cfg.output_path, out);
  log.Info("augmented " + std::to_string(summary.processed) + " files, " +
           std::to_string(summary.failures) + " failures");
  return summary.failures == 0 ? kExitOk : kExitDataError;
}

int CmdLeaderboard(const CliConfig &cfg, const LeaderboardFlags &f,
                   std::ostream &out, const Logger &log) {
  const ReportFormat format = ParseReportFormat(cfg.format.empty() ? "markdown" : cfg.format);
  const RankKey key = ParseRankKey(f.sort);
  ArenaManifest manifest = LoadManifest(cfg.manifest_path);
  EvaluateOptions options;
  options.jobs = cfg.jobs;
  if (f.join) options.join_mode = ParseJoinMode(*f.join);
  if (f.allow_gaps) options.allow_gaps = true;
  if (cfg.polarity) options.polarity = ParsePolarity(*cfg.polarity);
  options.decision_threshold = f.threshold;

  RunRecord record = EvaluateArena(manifest, options);
  record.summaries = Rank(std::move(record.summaries), key);
  StampRun(record);
  log.Info("evaluated " + std::to_string(record.reports.size()) + " pairs, run " +
           record.run_id);
  if (!f.store.empty()) {
    StoreAppend(f.store, record);
    log.Info("appended run to " + f.store);
  }
  const std::string report = Emit(record, format);
  if (!manifest.options.output_dir.empty()) {
    static const char *kExt[] = {"md", "csv", "json"};
    fs::create_directories(manifest.options.output_dir);
    const fs::path copy = fs::path(manifest.options.output_dir) /
                          (std::string("leaderboard.") + kExt[static_cast<int>(format)]);
    Deliver(report, copy.string(), out);
  }
  Deliver(report, cfg.output_path, out);
  return kExitOk;
}

int CmdHistory(const CliConfig &cfg, const std::string &store, std::ostream &out,
               const Logger &log) {
  const std::string format = cfg.format.empty() ? "markdown" : cfg.format;
  if (format != "markdown" && format != "json")
    throw ConfigError("history supports --format markdown or json");
  StoreListing listing = StoreList(store);
  for (const auto &c : listing.corrupt)
    log.Warn("unreadable record at byte " + std::to_string(c.byte_offset) + " (line " +
             std::to_string(c.line) + "): " + c.message);
  std::ostringstream doc;
  if (format == "json") {
    json j;
    j["records"] = listing.records;
    json corrupt = json::array();
    for (const auto &c : listing.corrupt)
      corrupt.push_back({{"byte_offset", c.byte_offset}, {"line", c.line},
                         {"message", c.message}});
    j["corrupt"] = std::move(corrupt);
    doc << j.dump(2) << '\n';
  } else {
    doc << "| # | Run | Timestamp | Manifest | Systems | Datasets | Best (pooled) |\n"
        << "|---:|---|---|---|---:|---:|---|\n";
    std::size_t i = 0;
    for (const auto &r : listing.records) {
      auto ranked = Rank(r.summaries, RankKey::kPooledEer);
      std::string best = "-";
      if (!ranked.empty()) {
        best = ranked.front().system_id;
        if (ranked.front().pooled_eer)
          best += " (" + FormatPercent(*ranked.front().pooled_eer) + ")";
      }
      doc << "| " << ++i << " | " << r.run_id << " | " << r.timestamp << " | "
          << r.manifest_digest.substr(0, 12) << " | " << r.summaries.size() << " | "
          << r.dataset_ids.size() << " | " << best << " |\n";
    }
    for (const auto &c : listing.corrupt)
      doc << "\nunreadable record at byte " << c.byte_offset << " (line " << c.line
          << ")";
    if (!listing.corrupt.empty()) doc << '\n';
  }
  Deliver(doc.str(), cfg.output_path, out);
  return kExitOk;
}

int CmdScore(const CliConfig &cfg, const ScoreFlags &f, std::ostream &out) {
  ScorerRequest request;
  request.command = f.command;
  request.audio_paths = ReadAudioList(f.list);
  request.timeout_seconds = f.timeout;
  request.system_id = f.system_id;
  request.dataset_id = f.dataset_id;
  if (cfg.polarity) request.polarity = ParsePolarity(*cfg.polarity);
  ScoreSet scores = RunExternalScorer(request);
  Deliver(SerializeScores(scores), cfg.output_path, out);
  return kExitOk;
}

}  // namespace

std::string VersionString() {
  return std::string("spoofbench ") + SPOOFBENCH_VERSION + " (manifest_version " +
         std::to_string(kManifestVersion) + ", record_version " +
         std::to_string(kRecordVersion) + ", augment_manifest_version " +
         std::to_string(kAugmentManifestVersion) + ")";
}

int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err) {
  CliConfig cfg;
  std::string log_level = "warn";
  EvalFlags eval;
  CorrelateFlags corr;
  AugmentFlags aug;
  LeaderboardFlags board;
  ScoreFlags score;
  std::string store;

  CLI::App app{"Benchmarking toolkit for speech deepfake detectors", "spoofbench"};
  app.set_version_flag("--version", VersionString());
  app.require_subcommand(1);
  app.fallthrough();
  try {
    cfg.jobs = DefaultJobs();
  } catch (const ConfigError &e) {
    ErrorRecord(err, "usage", e.what());
    return kExitUsageError;
  }
  app.add_option("--jobs", cfg.jobs, "Worker threads (default: $DF_ARENA_JOBS or 1)")
      ->check(CLI::Range(1u, 4096u));
  app.add_option("--log-level", log_level, "error, warn, info or debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
  app.add_option("-o,--output", cfg.output_path, "Write the result here instead of stdout");

  auto add_polarity = [&](CLI::App *sub) {
    sub->add_option("--polarity", cfg.polarity, "higher-is-bonafide or higher-is-spoof")
        ->check(CLI::IsMember({"higher-is-bonafide", "higher-is-spoof"}));
  };

  auto *cmd_eval = app.add_subcommand("eval", "Evaluate one score file against a protocol");
  cmd_eval->add_option("--protocol", eval.protocols, "Protocol file")->required()
      ->expected(1);
  cmd_eval->add_option("--scores", eval.scores, "Score file")->required()->expected(1);
  cmd_eval->add_option("--protocol-format", eval.protocol_format, "two-column or asvspoof")
      ->check(CLI::IsMember({"two-column", "asvspoof"}));
  cmd_eval->add_option("--join", eval.join, "strict or intersect")
      ->check(CLI::IsMember({"strict", "intersect"}));
  cmd_eval->add_option("--threshold", eval.threshold,
                       "Decision threshold for accuracy/F1 (default: EER threshold)");
  cmd_eval->add_option("--system-id", eval.system_id);
  cmd_eval->add_option("--dataset-id", eval.dataset_id);
  add_polarity(cmd_eval);

  auto *cmd_pool = app.add_subcommand("pool", "Pooled EER over several datasets");
  cmd_pool->add_option("--protocol", eval.protocols, "Protocol file (repeatable)")
      ->required();
  cmd_pool->add_option("--scores", eval.scores, "Score file (repeatable, same order)")
      ->required();
  cmd_pool->add_option("--protocol-format", eval.protocol_format)
      ->check(CLI::IsMember({"two-column", "asvspoof"}));
  cmd_pool->add_option("--join", eval.join)->check(CLI::IsMember({"strict", "intersect"}));
  cmd_pool->add_option("--threshold", eval.threshold);
  cmd_pool->add_option("--system-id", eval.system_id);
  add_polarity(cmd_pool);

  auto *cmd_corr = app.add_subcommand("correlate",
                                      "Correlate dataset EER columns with the average EER");
  cmd_corr->add_option("matrix,--matrix", corr.matrix, "EER matrix CSV")->required();
  cmd_corr->add_option("--bins", corr.bins, "Histogram bins for mutual information")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  cmd_corr->add_option("--systems", corr.systems, "Comma-separated system subset");
  cmd_corr->add_option("--format", cfg.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto *cmd_aug = app.add_subcommand("augment", "Perturb a 16 kHz WAV corpus");
  cmd_aug->add_option("--in", aug.in_dir, "Input directory")->required();
  cmd_aug->add_option("--out", aug.out_dir, "Output directory")->required();
  cmd_aug->add_option("--category", aug.category, "noise, music, speech or reverb")
      ->required()->check(CLI::IsMember({"noise", "music", "speech", "reverb"}));
  cmd_aug->add_option("--source", aug.source, "Interferer or RIR directory")->required();
  cmd_aug->add_option("--snr-low", aug.snr_low);
  cmd_aug->add_option("--snr-high", aug.snr_high);
  cmd_aug->add_option("--seed", cfg.seed)->required();
  cmd_aug->add_option("--clip", aug.clip, "peak-normalize or hard-clip")
      ->check(CLI::IsMember({"peak-normalize", "hard-clip"}));

  auto *cmd_board = app.add_subcommand("leaderboard", "Evaluate an arena and rank systems");
  cmd_board->add_option("manifest,--manifest", cfg.manifest_path, "Arena manifest")
      ->required();
  cmd_board->add_option("--sort", board.sort, "pooled_eer or average_eer")
      ->check(CLI::IsMember({"pooled_eer", "average_eer"}));
  cmd_board->add_option("--format", cfg.format, "markdown, csv or json")
      ->check(CLI::IsMember({"markdown", "csv", "json"}));
  cmd_board->add_option("--store", board.store, "Append the run to this store");
  cmd_board->add_flag("--allow-gaps", board.allow_gaps);
  cmd_board->add_option("--join", board.join)->check(CLI::IsMember({"strict", "intersect"}));
  cmd_board->add_option("--threshold", board.threshold);
  add_polarity(cmd_board);

  auto *cmd_hist = app.add_subcommand("history", "List runs in a store");
  cmd_hist->add_option("store,--store", store, "Run store")->required();
  cmd_hist->add_option("--format", cfg.format, "markdown or json")
      ->check(CLI::IsMember({"markdown", "json"}));

  auto *cmd_score = app.add_subcommand("score", "Score audio with an external command");
  cmd_score->add_option("--cmd", score.command, "Scorer command (run via /bin/sh)")
      ->required();
  cmd_score->add_option("--list", score.list, "Audio list, one path per line")->required();
  cmd_score->add_option("--timeout", score.timeout, "Seconds")
      ->check(CLI::PositiveNumber);
  cmd_score->add_option("--system-id", score.system_id);
  cmd_score->add_option("--dataset-id", score.dataset_id);
  add_polarity(cmd_score);

  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    ErrorRecord(err, "usage", e.what());
    err << app.help();
    return kExitUsageError;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  Logger log(err, ParseLogLevel(log_level));
  try {
    if (cfg.subcommand == "eval") return CmdEval(cfg, eval, out);
    if (cfg.subcommand == "pool") return CmdPool(cfg, eval, out);
    if (cfg.subcommand == "correlate") return CmdCorrelate(cfg, corr, out);
    if (cfg.subcommand == "augment") return CmdAugment(cfg, aug, out, log);
    if (cfg.subcommand == "leaderboard") return CmdLeaderboard(cfg, board, out, log);
    if (cfg.subcommand == "history") return CmdHistory(cfg, store, out, log);
    if (cfg.subcommand == "score") return CmdScore(cfg, score, out);
  } catch (const ConfigError &e) {
    ErrorRecord(err, "usage", e.what());
    return kExitUsageError;
  } catch (const DataError &e) {
    ErrorRecord(err, "data", e.what(), e.path());
    return kExitDataError;
  } catch (const std::exception &e) {
    ErrorRecord(err, "runtime", e.what());
    return kExitDataError;
  }
  ErrorRecord(err, "usage", "unknown subcommand " + cfg.subcommand);
  return kExitUsageError;
}

}  // namespace spoofbench

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

#include "spoofbench/protocol.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spoofbench/error.h"

namespace spoofbench {

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Calls fn(line_number, fields) for every line that is neither blank nor a
// '#' comment.
template <typename Fn>
void ForEachRecord(std::string_view text, Fn &&fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto fields = SplitWhitespace(line);
    if (!fields.empty() && fields[0].front() != '#') fn(line_no, fields);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

std::string DefaultId(const std::string &given, const std::string &path) {
  if (!given.empty()) return given;
  return TrialIdFromPath(path);
}

}  // namespace

const char *ToString(Label label) {
  return label == Label::kBonafide ? "bonafide" : "spoof";
}

const char *ToString(Polarity polarity) {
  return polarity == Polarity::kHigherIsBonafide ? "higher-is-bonafide"
                                                 : "higher-is-spoof";
}

const char *ToString(ProtocolFormat format) {
  return format == ProtocolFormat::kTwoColumn ? "two-column" : "asvspoof";
}

const char *ToString(JoinMode mode) {
  return mode == JoinMode::kStrict ? "strict" : "intersect";
}

Polarity ParsePolarity(std::string_view text) {
  if (text == "higher-is-bonafide") return Polarity::kHigherIsBonafide;
  if (text == "higher-is-spoof") return Polarity::kHigherIsSpoof;
  throw ConfigError("unknown polarity '" + std::string(text) +
                    "' (expected higher-is-bonafide or higher-is-spoof)");
}

ProtocolFormat ParseProtocolFormat(std::string_view text) {
  if (text == "two-column") return ProtocolFormat::kTwoColumn;
  if (text == "asvspoof") return ProtocolFormat::kAsvspoof;
  throw ConfigError("unknown protocol format '" + std::string(text) +
                    "' (expected two-column or asvspoof)");
}

JoinMode ParseJoinMode(std::string_view text) {
  if (text == "strict") return JoinMode::kStrict;
  if (text == "intersect") return JoinMode::kIntersect;
  throw ConfigError("unknown join mode '" + std::string(text) +
                    "' (expected strict or intersect)");
}

LabelAliases LabelAliases::Default() {
  LabelAliases aliases;
  for (const char *t : {"bonafide", "bona-fide", "bona_fide", "genuine", "real",
                        "human", "target", "1"})
    aliases.Add(t, Label::kBonafide);
  for (const char *t : {"spoof", "spoofed", "fake", "deepfake", "synthetic",
                        "nontarget", "0"})
    aliases.Add(t, Label::kSpoof);
  return aliases;
}

void LabelAliases::Add(std::string_view token, Label label) {
  table_[Lower(token)] = label;
}

std::optional<Label> LabelAliases::Lookup(std::string_view token) const {
  auto it = table_.find(Lower(token));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

TrialSet::TrialSet(std::string dataset_id, std::vector<Trial> trials)
    : dataset_id_(std::move(dataset_id)), trials_(std::move(trials)) {
  if (trials_.empty())
    throw DataError("protocol '" + dataset_id_ + "' has no trials");
  index_.reserve(trials_.size());
  for (std::size_t i = 0; i < trials_.size(); ++i) {
    if (!index_.emplace(trials_[i].id, i).second)
      throw DataError("duplicate trial id '" + trials_[i].id +
                      "' in protocol '" + dataset_id_ + "'");
  }
  if (CountLabel(Label::kBonafide) == 0)
    throw DataError("protocol '" + dataset_id_ + "' has no bonafide trials");
  if (CountLabel(Label::kSpoof) == 0)
    throw DataError("protocol '" + dataset_id_ + "' has no spoof trials");
}

std::size_t TrialSet::CountLabel(Label label) const {
  return std::count_if(trials_.begin(), trials_.end(),
                       [label](const Trial &t) { return t.label == label; });
}

std::optional<std::size_t> TrialSet::Find(std::string_view trial_id) const {
  auto it = index_.find(std::string(trial_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ScoreSet::ScoreSet(std::string system_id, std::string dataset_id,
                   Polarity polarity, std::vector<Entry> entries)
    : system_id_(std::move(system_id)),
      dataset_id_(std::move(dataset_id)),
      polarity_(polarity),
      entries_(std::move(entries)) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i].score))
      throw DataError("non-finite score for trial '" + entries_[i].trial_id +
                      "'");
    if (!index_.emplace(entries_[i].trial_id, i).second)
      throw DataError("duplicate trial id '" + entries_[i].trial_id +
                      "' in scores");
  }
}

std::optional<double> ScoreSet::Lookup(std::string_view trial_id) const {
  auto it = index_.find(std::string(trial_id));
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].score;
}

TrialSet ParseProtocolText(std::string_view text, ProtocolFormat format,
                           const LabelAliases &aliases, std::string dataset_id,
                           const std::string &source_name) {
  std::vector<Trial> trials;
  std::unordered_map<std::string, std::size_t> first_seen;
  ForEachRecord(text, [&](std::size_t line, const auto &fields) {
    std::string_view id, label_token;
    std::optional<std::string> attack;
    if (format == ProtocolFormat::kTwoColumn) {
      if (fields.size() != 2)
        throw DataError(AtLine(source_name, line,
                               "expected 2 fields, found " +
                                   std::to_string(fields.size())),
                        source_name);
      id = fields[0];
      label_token = fields[1];
    } else {
      if (fields.size() != 5)
        throw DataError(AtLine(source_name, line,
                               "expected 5 fields, found " +
                                   std::to_string(fields.size())),
                        source_name);
      id = fields[1];
      if (fields[3] != "-") attack = std::string(fields[3]);
      label_token = fields[4];
    }
    auto label = aliases.Lookup(label_token);
    if (!label)
      throw DataError(AtLine(source_name, line,
                             "unknown label '" + std::string(label_token) + "'"),
                      source_name);
    auto [it, inserted] = first_seen.emplace(std::string(id), line);
    if (!inserted)
      throw DataError(AtLine(source_name, line,
                             "duplicate trial id '" + std::string(id) +
                                 "' (first seen on line " +
                                 std::to_string(it->second) + ")"),
                      source_name);
    trials.push_back(Trial{std::string(id), *label, std::move(attack)});
  });
  if (trials.empty())
    throw DataError(source_name + ": protocol is empty", source_name);
  try {
    return TrialSet(std::move(dataset_id), std::move(trials));
  } catch (const DataError &e) {
    throw DataError(source_name + ": " + e.what(), source_name);
  }
}

TrialSet ParseProtocol(const std::string &path, ProtocolFormat format,
                       const LabelAliases &aliases, std::string dataset_id) {
  return ParseProtocolText(ReadFile(path), format, aliases,
                           DefaultId(dataset_id, path), path);
}

std::string SerializeProtocol(const TrialSet &trials) {
  std::string out;
  for (const auto &t : trials.trials()) {
    out += t.id;
    out += ' ';
    out += ToString(t.label);
    out += '\n';
  }
  return out;
}

ScoreSet ParseScoresText(std::string_view text, Polarity polarity,
                         std::string system_id, std::string dataset_id,
                         const std::string &source_name) {
  std::vector<ScoreSet::Entry> entries;
  std::unordered_map<std::string, std::size_t> first_seen;
  ForEachRecord(text, [&](std::size_t line, const auto &fields) {
    if (fields.size() != 2)
      throw DataError(AtLine(source_name, line,
                             "expected 'trial_id score', found " +
                                 std::to_string(fields.size()) + " fields"),
                      source_name);
    double value = 0.0;
    std::string_view token = fields[1];
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
      throw DataError(AtLine(source_name, line,
                             "non-numeric score '" + std::string(fields[1]) +
                                 "'"),
                      source_name);
    if (!std::isfinite(value))
      throw DataError(AtLine(source_name, line,
                             "non-finite score '" + std::string(fields[1]) +
                                 "'"),
                      source_name);
    auto [it, inserted] = first_seen.emplace(std::string(fields[0]), line);
    if (!inserted)
      throw DataError(AtLine(source_name, line,
                             "duplicate trial id '" + std::string(fields[0]) +
                                 "' (first seen on line " +
                                 std::to_string(it->second) + ")"),
                      source_name);
    entries.push_back({std::string(fields[0]), value});
  });
  return ScoreSet(std::move(system_id), std::move(dataset_id), polarity,
                  std::move(entries));
}

ScoreSet ParseScores(const std::string &path, Polarity polarity,
                     std::string system_id, std::string dataset_id) {
  return ParseScoresText(ReadFile(path), polarity, std::move(system_id),
                         DefaultId(dataset_id, path), path);
}

std::string SerializeScores(const ScoreSet &scores) {
  std::string out;
  char buf[64];
  for (const auto &e : scores.entries()) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), e.score);
    out += e.trial_id;
    out += ' ';
    out.append(buf, ptr);
    out += '\n';
  }
  return out;
}

JoinResult Join(const TrialSet &trials, const ScoreSet &scores, JoinMode mode) {
  const double sign = scores.polarity() == Polarity::kHigherIsSpoof ? -1.0 : 1.0;
  JoinResult result;
  result.rows.reserve(trials.size());
  std::vector<std::string> missing;
  for (const auto &t : trials.trials()) {
    auto score = scores.Lookup(t.id);
    if (!score) {
      ++result.dropped_trials;
      if (missing.size() < 10) missing.push_back(t.id);
      continue;
    }
    result.rows.push_back({t.label, sign * *score});
  }
  std::vector<std::string> extra;
  for (const auto &e : scores.entries()) {
    if (!trials.Find(e.trial_id)) {
      ++result.dropped_scores;
      if (extra.size() < 10) extra.push_back(e.trial_id);
    }
  }
  if (mode == JoinMode::kStrict &&
      (result.dropped_trials > 0 || result.dropped_scores > 0)) {
    std::ostringstream msg;
    msg << "scores for system '" << scores.system_id() << "' do not match "
        << "protocol '" << trials.dataset_id() << "'";
    auto list = [&msg](const char *what, const std::vector<std::string> &ids,
                       std::size_t total) {
      if (ids.empty()) return;
      msg << "; " << what << ":";
      for (const auto &id : ids) msg << ' ' << id;
      if (total > ids.size()) msg << " (+" << total - ids.size() << " more)";
    };
    list("missing", missing, result.dropped_trials);
    list("extra", extra, result.dropped_scores);
    throw DataError(msg.str());
  }
  return result;
}

std::string TrialIdFromPath(std::string_view path) {
  return std::filesystem::path(path).stem().string();
}

}  // namespace spoofbench

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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "spoofbench/error.h"
#include "spoofbench/manifest.h"
#include "test_util.h"

namespace spoofbench {
namespace {

using testing::TempDir;

SystemSummary PublishedSummary(const testing::PublishedRow &row) {
  std::map<std::string, double> eers;
  for (int d = 0; d < 14; ++d) eers[testing::kPublishedDatasets[d]] = row.eer_percent[d] / 100;
  return SummarizeEers(row.system, eers);
}

std::size_t CountLines(const std::string &text, const std::string &prefix) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += line.rfind(prefix, 0) == 0;
  return n;
}

TEST(FormatPercent, TwoDecimalsHalfEven) {
  EXPECT_EQ(FormatPercent(0.138457142857), "13.85");
  EXPECT_EQ(FormatPercent(0.0305357142857), "3.05");
  EXPECT_EQ(FormatPercent(0.0), "0.00");
  EXPECT_EQ(FormatPercent(1.0), "100.00");
  EXPECT_EQ(FormatPercent(0.00125), "0.12");  // exact binary tie 12.5 -> 12
  EXPECT_EQ(FormatPercent(0.00375), "0.38");  // 37.5 -> 38
}

TEST(SummarizeEers, PublishedAverages) {
  const SystemSummary xlsr = PublishedSummary(testing::kOpenSourceRows[0]);
  EXPECT_EQ(xlsr.system_id, "XLSR+SLS");
  EXPECT_NEAR(xlsr.average_eer * 100, 13.84, 0.01);
  // The row mean is 13.8457..., which rounds to 13.85 at two decimals.
  EXPECT_EQ(FormatPercent(xlsr.average_eer), "13.85");
  const SystemSummary whispeak = PublishedSummary(testing::kProprietaryRows[0]);
  EXPECT_NEAR(whispeak.average_eer * 100, 3.05, 0.01);
  EXPECT_EQ(FormatPercent(whispeak.average_eer), "3.05");
  EXPECT_THROW(SummarizeEers("x", {}), DataError);
}

TEST(Rank, PublishedPooledOrdering) {
  // Published pooled EER (%), keyed by the row names of the per-dataset table.
  const std::vector<std::pair<const char *, double>> pooled = {
      {"Whispeak", 3.00},         {"Syntra", 11.29},         {"Resemble", 12.37},
      {"XLSR+SLS", 15.68},        {"TCM", 16.35},            {"Nes2NetX", 17.04},
      {"Wav2Vec2 AASIST", 19.47}, {"XLSR Mamba", 20.12},     {"Whisper Mesonet", 23.76},
      {"Wav2Vec2 ECAPA", 28.81},  {"AASIST", 33.16},         {"WavLM ECAPA", 33.48},
      {"RawGatST", 33.93},        {"Rawnet2", 35.66},        {"Hubert ECAPA", 43.03}};
  std::vector<SystemSummary> summaries;
  auto add = [&](const testing::PublishedRow &row) {
    SystemSummary s = PublishedSummary(row);
    for (const auto &[id, p] : pooled)
      if (s.system_id == id) s.pooled_eer = p / 100;
    ASSERT_TRUE(s.pooled_eer) << s.system_id;
    summaries.push_back(s);
  };
  for (const auto &row : testing::kProprietaryRows) add(row);
  for (const auto &row : testing::kOpenSourceRows) add(row);
  auto ranked = Rank(summaries, RankKey::kPooledEer);
  EXPECT_EQ(ranked.front().system_id, "Whispeak");
  EXPECT_EQ(FormatPercent(*ranked.front().pooled_eer), "3.00");
  EXPECT_EQ(ranked.back().system_id, "Hubert ECAPA");
  EXPECT_EQ(FormatPercent(*ranked.back().pooled_eer), "43.03");
}

TEST(Rank, TieBreaksAndTotalOrder) {
  auto make = [](std::string id, double avg, std::optional<double> pooled) {
    SystemSummary s;
    s.system_id = std::move(id);
    s.average_eer = avg;
    s.pooled_eer = pooled;
    return s;
  };
  std::vector<SystemSummary> in = {make("c", 0.2, 0.1), make("b", 0.1, 0.1),
                                   make("a", 0.1, 0.1), make("gap", 0.0, std::nullopt),
                                   make("d", 0.3, 0.05)};
  auto ids = [](const std::vector<SystemSummary> &v) {
    std::vector<std::string> out;
    for (const auto &s : v) out.push_back(s.system_id);
    return out;
  };
  const auto pooled = ids(Rank(in, RankKey::kPooledEer));
  EXPECT_EQ(pooled, (std::vector<std::string>{"d", "a", "b", "c", "gap"}));
  EXPECT_EQ(ids(Rank(in, RankKey::kAverageEer)),
            (std::vector<std::string>{"gap", "a", "b", "c", "d"}));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(in.begin(), in.end(), rng);
    EXPECT_EQ(ids(Rank(in, RankKey::kPooledEer)), pooled);
  }
  EXPECT_EQ(ids(Rank({make("only", 0.5, 0.5)}, RankKey::kPooledEer)),
            (std::vector<std::string>{"only"}));
  EXPECT_THROW(ParseRankKey("eer"), ConfigError);
}

TEST(EvaluateArena, OneByOne) {
  TempDir dir;
  testing::WriteDataset(dir.path(), "d", 3, 3);
  testing::WriteScores(dir.path() / "s.txt", "d", {0.9, 0.8, 0.3}, {0.7, 0.2, 0.1});
  testing::WriteText(dir / "m.json", R"({"manifest_version": 1,
    "datasets": [{"id": "d", "protocol": "d.txt"}],
    "systems": [{"id": "s", "polarity": "higher-is-bonafide", "scores": {"d": "s.txt"}}]})");
  RunRecord r = EvaluateArena(LoadManifest(dir / "m.json"), {});
  ASSERT_EQ(r.reports.size(), 1u);
  ASSERT_EQ(r.summaries.size(), 1u);
  EXPECT_NEAR(r.summaries[0].average_eer, 1.0 / 3, 1e-12);
  EXPECT_EQ(*r.summaries[0].pooled_eer, r.summaries[0].average_eer);
  const std::string md = Emit(r, ReportFormat::kMarkdown);
  EXPECT_EQ(CountLines(md, "| s |"), 1u);
  EXPECT_NE(md.find("| System | d | Average | Pooled |"), std::string::npos) << md;
}

class DivergenceTest : public ::testing::Test {
 protected:
  void SetUp() override { manifest_ = LoadManifest(testing::WriteDivergenceArena(dir_.path())); }
  TempDir dir_;
  ArenaManifest manifest_;
};

TEST_F(DivergenceTest, ShapeAndSummaries) {
  RunRecord r = EvaluateArena(manifest_, {});
  ASSERT_EQ(r.reports.size(), 4u);
  ASSERT_EQ(r.summaries.size(), 2u);
  EXPECT_EQ(r.manifest_digest, manifest_.digest);
  const auto &a = r.summaries[0], &b = r.summaries[1];
  EXPECT_LT(a.per_dataset_eer.at("d1"), b.per_dataset_eer.at("d1"));
  EXPECT_GT(a.per_dataset_eer.at("d2"), b.per_dataset_eer.at("d2"));
  EXPECT_GT(*a.pooled_eer, a.average_eer);
  EXPECT_NEAR(a.average_eer, 0.125, 1e-12);
  EXPECT_NEAR(*a.pooled_eer, 1.0 / 3, 1e-12);
  EXPECT_NEAR(b.average_eer, 0.1875, 1e-12);
  EXPECT_NEAR(*b.pooled_eer, 1.0 / 12, 1e-12);
  for (const auto &s : r.summaries) {
    double sum = 0;
    for (const auto &[d, e] : s.per_dataset_eer) sum += e;
    EXPECT_NEAR(s.average_eer, sum / s.per_dataset_eer.size(), 1e-12);
  }
  EXPECT_EQ(Rank(r.summaries, RankKey::kAverageEer).front().system_id, "A");
  EXPECT_EQ(Rank(r.summaries, RankKey::kPooledEer).front().system_id, "B");
}

TEST_F(DivergenceTest, DeterministicAcrossJobs) {
  EvaluateOptions serial, parallel;
  parallel.jobs = 8;
  EXPECT_EQ(EvaluateArena(manifest_, serial), EvaluateArena(manifest_, parallel));
}

TEST_F(DivergenceTest, EmitFormats) {
  RunRecord r = EvaluateArena(manifest_, {});
  r.summaries = Rank(r.summaries, RankKey::kPooledEer);
  const std::string md = Emit(r, ReportFormat::kMarkdown);
  EXPECT_EQ(md.rfind("| System | d1 | d2 | Average | Pooled |\n|---|---:|---:|---:|---:|\n", 0), 0u)
      << md;
  EXPECT_NE(md.find("| B | 25.00 | **12.50** | 18.75 | **8.33** |"), std::string::npos) << md;
  EXPECT_NE(md.find("| A | **0.00** | 25.00 | **12.50** | 33.33 |"), std::string::npos) << md;

  const std::string csv = Emit(r, ReportFormat::kCsv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "system_id,params_m,d1,d2,average_eer,pooled_eer");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("\nB,1.5,0.25,0.125,0.1875,0.083333333333333329\n"), std::string::npos)
      << csv;
}

TEST_F(DivergenceTest, JsonRoundTripIsBitExact) {
  RunRecord r = EvaluateArena(manifest_, {});
  StampRun(r);
  RunRecord back = nlohmann::json::parse(Emit(r, ReportFormat::kJson)).get<RunRecord>();
  EXPECT_EQ(back, r);
  nlohmann::json j = r;
  j["record_version"] = 99;
  EXPECT_THROW(j.get<RunRecord>(), DataError);
}

TEST_F(DivergenceTest, StampRunIds) {
  RunRecord r1, r2;
  StampRun(r1);
  StampRun(r2);
  EXPECT_EQ(r1.run_id.rfind("run-", 0), 0u);
  EXPECT_NE(r1.run_id, r2.run_id);
  EXPECT_EQ(r1.timestamp.size(), 20u);
  EXPECT_EQ(r1.timestamp.back(), 'Z');
}

TEST_F(DivergenceTest, GapsNeedPermission) {
  ArenaManifest m = manifest_;
  m.systems[1].score_paths.erase("d2");
  try {
    EvaluateArena(m, {});
    FAIL();
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("[system=B dataset=d2]"), std::string::npos);
  }
  EvaluateOptions allow;
  allow.allow_gaps = true;
  RunRecord r = EvaluateArena(m, allow);
  EXPECT_EQ(r.reports.size(), 3u);
  EXPECT_FALSE(r.summaries[1].pooled_eer);
  EXPECT_EQ(r.summaries[1].missing_datasets, (std::vector<std::string>{"d2"}));
  const std::string md = Emit(r, ReportFormat::kMarkdown);
  EXPECT_NE(md.find("| B \xE2\x80\xA0 | 25.00 | - | 25.00 | - |"), std::string::npos) << md;
  EXPECT_THROW(ToEerMatrix(r), DataError);
}

TEST_F(DivergenceTest, JoinErrorsNameThePair) {
  testing::WriteText(dir_ / "A_d2.txt", "d2_b0 0.5\n");
  try {
    EvaluateArena(manifest_, {});
    FAIL();
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("[system=A dataset=d2]"), std::string::npos) << e.what();
  }
  EvaluateOptions intersect;
  intersect.join_mode = JoinMode::kIntersect;
  try {
    EvaluateArena(manifest_, intersect);  // one bonafide trial left: single class
    FAIL();
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("[system=A dataset=d2]"), std::string::npos);
  }
}

TEST_F(DivergenceTest, IntersectNotesDrops) {
  testing::WriteText(dir_ / "A_d1.txt", "d1_b0 1\nd1_s0 0\nzz 3\n");
  EvaluateOptions intersect;
  intersect.join_mode = JoinMode::kIntersect;
  RunRecord r = EvaluateArena(manifest_, intersect);
  ASSERT_EQ(r.notes.size(), 1u);
  EXPECT_NE(r.notes[0].find("6 trials without scores and 1 scores without trials"),
            std::string::npos)
      << r.notes[0];
}

TEST_F(DivergenceTest, PolarityOverrideFlipsEverySystem) {
  EvaluateOptions flip;
  flip.polarity = Polarity::kHigherIsSpoof;
  RunRecord r = EvaluateArena(manifest_, flip);
  EXPECT_EQ(r.reports[0].eer, 1.0);  // A on d1 becomes perfectly inverted
}

TEST(ToEerMatrix, FollowsDatasetOrder) {
  TempDir dir;
  RunRecord r = EvaluateArena(LoadManifest(testing::WriteDivergenceArena(dir.path())), {});
  EerMatrix m = ToEerMatrix(r);
  EXPECT_EQ(m.dataset_ids(), (std::vector<std::string>{"d1", "d2"}));
  EXPECT_EQ(m.at(1, 1), 0.125);
}

TEST(ReportFormat, Parse) {
  EXPECT_EQ(ParseReportFormat("csv"), ReportFormat::kCsv);
  EXPECT_THROW(ParseReportFormat("html"), ConfigError);
}

}  // namespace
}  // namespace spoofbench

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

#include "spoofbench/metrics.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.h"
#include "spoofbench/error.h"
#include "test_util.h"

namespace spoofbench {
namespace {

using testing::Rows;

double Eer(const std::vector<ScoredTrial> &rows) { return ComputeEer(ComputeRoc(rows)).eer; }
double Auc(const std::vector<ScoredTrial> &rows) { return ComputeAuc(ComputeRoc(rows)); }

const std::vector<ScoredTrial> kSmall = Rows({0.9, 0.8, 0.3}, {0.7, 0.2, 0.1});

TEST(Roc, PerfectSeparationReachesOrigin) {
  RocCurve c = ComputeRoc(Rows({1.0}, {0.0}));
  bool found = false;
  for (std::size_t i = 0; i < c.far.size(); ++i) found |= c.far[i] == 0 && c.frr[i] == 0;
  EXPECT_TRUE(found);
}

TEST(Roc, InvertedSystemKeepsEndpoints) {
  RocCurve c = ComputeRoc(Rows({0.0}, {1.0}));
  for (std::size_t i = 0; i < c.far.size(); ++i) EXPECT_GE(c.far[i] + c.frr[i], 1.0);
  EXPECT_EQ(c.far.front(), 1.0);
  EXPECT_EQ(c.frr.front(), 0.0);
  EXPECT_EQ(c.far.back(), 0.0);
  EXPECT_EQ(c.frr.back(), 1.0);
}

TEST(Roc, SmallExampleMidInterval) {
  RocCurve c = ComputeRoc(kSmall);
  int hits = 0;
  for (std::size_t i = 0; i < c.thresholds.size(); ++i) {
    if (c.thresholds[i] > 0.3 && c.thresholds[i] < 0.7) {
      EXPECT_DOUBLE_EQ(c.far[i], 1.0 / 3);
      EXPECT_DOUBLE_EQ(c.frr[i], 1.0 / 3);
      ++hits;
    }
  }
  EXPECT_EQ(hits, 1);  // the single midpoint 0.5
}

TEST(Roc, SingleClassIsRejected) {
  EXPECT_THROW(ComputeRoc(Rows({0.1, 0.2}, {})), DataError);
  EXPECT_THROW(ComputeRoc(Rows({}, {0.1})), DataError);
}

TEST(Roc, ValidateRejectsBrokenCurves) {
  EXPECT_THROW(ValidateRoc({{0.0}, {1.0}, {0.0}}), DataError);
  EXPECT_THROW(ValidateRoc({{0, 1}, {1, 0}, {0}}), DataError);
  EXPECT_THROW(ValidateRoc({{1, 0}, {1, 0}, {0, 1}}), DataError);
  EXPECT_THROW(ValidateRoc({{0, 1}, {0, 1}, {0, 1}}), DataError);
  EXPECT_THROW(ValidateRoc({{0, 1}, {1, 0}, {0, 1.5}}), DataError);
  EXPECT_NO_THROW(ValidateRoc({{0, 1}, {1, 0}, {0, 1}}));
}

TEST(Eer, Examples) {
  EXPECT_EQ(Eer(Rows({1.0}, {0.0})), 0.0);
  EXPECT_NEAR(Eer(kSmall), 1.0 / 3, 1e-12);
  OperatingPoint op = ComputeEer(ComputeRoc(kSmall));
  EXPECT_DOUBLE_EQ(op.threshold, 0.5);
}

TEST(Eer, InterpolatesBetweenBracketingPoints) {
  // FAR-FRR goes from +1/2 to -1/2 across a single step; the crossing is
  // halfway and the threshold interpolates with it.
  RocCurve c{{0.0, 1.0, 2.0, 3.0}, {1.0, 0.5, 0.0, 0.0}, {0.0, 0.0, 0.5, 1.0}};
  OperatingPoint op = ComputeEer(c);
  EXPECT_DOUBLE_EQ(op.eer, 0.25);
  EXPECT_DOUBLE_EQ(op.threshold, 1.5);
}

TEST(Eer, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2024);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t nb = 1 + rng() % 25, ns = 1 + rng() % 25;
    std::vector<double> bona(nb), spoof(ns);
    // A coarse grid forces plenty of ties.
    const int grid = 2 + static_cast<int>(rng() % 12);
    for (auto &s : bona) s = static_cast<double>(rng() % grid) / grid + 0.1;
    for (auto &s : spoof) s = static_cast<double>(rng() % grid) / grid;
    EXPECT_NEAR(Eer(Rows(bona, spoof)), testing::BruteForceEer(bona, spoof), 1e-12)
        << "iteration " << iter;
  }
}

TEST(Eer, GaussianMatchesNormalCdf) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> bona(1.0, 1.0), spoof(-1.0, 1.0);
  std::vector<ScoredTrial> rows;
  for (int i = 0; i < 100000; ++i) {
    rows.push_back({Label::kBonafide, bona(rng)});
    rows.push_back({Label::kSpoof, spoof(rng)});
  }
  EXPECT_NEAR(Eer(rows), 0.5 * std::erfc(1.0 / std::sqrt(2.0)), 0.005);
  EXPECT_NEAR(Auc(rows), 0.5 * std::erfc(-1.0), 0.003);  // Phi(2/sqrt 2)
}

std::vector<ScoredTrial> RandomRows(std::mt19937_64 &rng, std::size_t n, bool ties) {
  std::vector<ScoredTrial> rows;
  std::normal_distribution<double> g(0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    double s = ties ? std::round(g(rng) * 3) / 3 : g(rng);
    rows.push_back({i % 2 ? Label::kSpoof : Label::kBonafide, s + (i % 2 ? 0 : 0.7)});
  }
  return rows;
}

TEST(Metrics, MonotoneInvariance) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 50; ++iter) {
    auto rows = RandomRows(rng, 40, iter % 2);
    auto mapped = rows;
    auto f = [](double s) { return std::exp(s) * 3 + 1; };
    for (auto &r : mapped) r.score = f(r.score);
    EXPECT_NEAR(Eer(rows), Eer(mapped), 1e-12);
    EXPECT_NEAR(Auc(rows), Auc(mapped), 1e-12);
    const double t = rows[3].score;
    auto a = ComputeThresholdMetrics(rows, t).counts;
    auto b = ComputeThresholdMetrics(mapped, f(t)).counts;
    EXPECT_EQ(a.tp, b.tp);
    EXPECT_EQ(a.fn, b.fn);
    EXPECT_EQ(a.fp, b.fp);
    EXPECT_EQ(a.tn, b.tn);
  }
}

TEST(Metrics, NegateAndSwapLabelsKeepsEer) {
  std::mt19937_64 rng(6);
  for (int iter = 0; iter < 50; ++iter) {
    auto rows = RandomRows(rng, 30, iter % 2);
    auto swapped = rows;
    for (auto &r : swapped) {
      r.score = -r.score;
      r.label = r.label == Label::kBonafide ? Label::kSpoof : Label::kBonafide;
    }
    EXPECT_NEAR(Eer(rows), Eer(swapped), 1e-12);
  }
}

TEST(Auc, NegationIsAntisymmetricOnTieFreeInput) {
  std::mt19937_64 rng(8);
  for (int iter = 0; iter < 50; ++iter) {
    auto rows = RandomRows(rng, 31, false);
    auto negated = rows;
    for (auto &r : negated) r.score = -r.score;
    EXPECT_NEAR(Auc(rows), 1.0 - Auc(negated), 1e-12);
  }
}

TEST(Auc, MatchesPairwiseOracle) {
  std::mt19937_64 rng(12);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<double> bona, spoof;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 20); ++i) bona.push_back(rng() % 7);
    for (int i = 0; i < 1 + static_cast<int>(rng() % 20); ++i) spoof.push_back(rng() % 7);
    EXPECT_NEAR(Auc(Rows(bona, spoof)), testing::PairwiseAuc(bona, spoof), 1e-12);
  }
}

TEST(Auc, Extremes) {
  EXPECT_DOUBLE_EQ(Auc(Rows({1.0, 0.9}, {0.0, 0.1})), 1.0);
  EXPECT_DOUBLE_EQ(Auc(Rows({0.0, 0.1}, {1.0, 0.9})), 0.0);
}

TEST(Metrics, RatesBoundedAndMonotone) {
  std::mt19937_64 rng(13);
  auto rows = RandomRows(rng, 200, true);
  RocCurve c = ComputeRoc(rows);
  for (std::size_t i = 0; i < c.far.size(); ++i) {
    EXPECT_GE(c.far[i], 0.0);
    EXPECT_LE(c.far[i], 1.0);
    EXPECT_GE(c.frr[i], 0.0);
    EXPECT_LE(c.frr[i], 1.0);
    if (i) {
      EXPECT_LT(c.thresholds[i - 1], c.thresholds[i]);
      EXPECT_LE(c.far[i], c.far[i - 1]);
      EXPECT_GE(c.frr[i], c.frr[i - 1]);
    }
  }
}

TEST(Pooled, SingleSetIsIdentity) {
  std::span<const ScoredTrial> one(kSmall);
  OperatingPoint op = PooledEer(std::span(&one, 1));
  EXPECT_DOUBLE_EQ(op.eer, Eer(kSmall));
}

TEST(Pooled, ScaleMismatchIsPenalised) {
  auto a = Rows({10, 9}, {1, 2});
  auto b = Rows({0.6, 0.5}, {0.4, 0.3});
  EXPECT_EQ(Eer(a), 0.0);
  EXPECT_EQ(Eer(b), 0.0);
  std::vector<std::span<const ScoredTrial>> sets{a, b};
  EXPECT_DOUBLE_EQ(PooledEer(sets).eer, 0.5);
}

TEST(Pooled, CopiesOfOneSetMatchExactly) {
  std::mt19937_64 rng(21);
  for (int iter = 0; iter < 20; ++iter) {
    auto rows = RandomRows(rng, 25 + iter, iter % 2);
    std::vector<std::span<const ScoredTrial>> sets(1 + iter % 5, rows);
    EXPECT_EQ(PooledEer(sets).eer, Eer(rows));
  }
}

TEST(Pooled, Errors) {
  EXPECT_THROW(PooledEer({}), DataError);
  auto a = Rows({1, 2}, {});
  std::vector<std::span<const ScoredTrial>> sets{a};
  EXPECT_THROW(PooledEer(sets), DataError);
}

TEST(ThresholdMetrics, ConfusionExample) {
  ThresholdMetrics m = ComputeThresholdMetrics(kSmall, 0.75);
  EXPECT_EQ(m.counts.tp, 2u);
  EXPECT_EQ(m.counts.fn, 1u);
  EXPECT_EQ(m.counts.fp, 0u);
  EXPECT_EQ(m.counts.tn, 3u);
  EXPECT_DOUBLE_EQ(m.accuracy, 5.0 / 6);
  EXPECT_DOUBLE_EQ(m.precision, 1.0);
  EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3);
  EXPECT_NEAR(m.f1, 0.8, 1e-12);
}

TEST(ThresholdMetrics, AllRejectedGivesZeroF1) {
  EXPECT_EQ(ComputeThresholdMetrics(kSmall, 5.0).f1, 0.0);
}

TEST(ThresholdMetrics, ScoreAtThresholdIsAccepted) {
  ThresholdMetrics m = ComputeThresholdMetrics(Rows({0.5}, {0.5}), 0.5);
  EXPECT_EQ(m.counts.tp, 1u);
  EXPECT_EQ(m.counts.fp, 1u);
}

TEST(Evaluate, PerfectSeparationAtEerThreshold) {
  EvalReport r = Evaluate("sys", "ds", Rows({0.9, 0.8}, {0.1, 0.2}));
  EXPECT_EQ(r.eer, 0.0);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.auc, 1.0);
  EXPECT_EQ(r.decision_threshold, r.eer_threshold);
  EXPECT_EQ(r.n_bonafide, 2u);
  EXPECT_EQ(r.n_spoof, 2u);
}

TEST(Evaluate, FixedThresholdAndJsonRoundTrip) {
  EvalReport r = Evaluate("sys", "ds", kSmall, 0.75);
  EXPECT_EQ(r.decision_threshold, 0.75);
  EXPECT_NEAR(r.f1, 0.8, 1e-12);
  nlohmann::json j = r;
  for (const char *key : {"system_id", "dataset_id", "eer", "eer_threshold", "auc",
                          "accuracy", "f1", "decision_threshold", "n_bonafide", "n_spoof"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.size(), 10u);
  EXPECT_EQ(nlohmann::json::parse(j.dump()).get<EvalReport>(), r);
}

}  // namespace
}  // namespace spoofbench

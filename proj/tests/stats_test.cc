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

#include "spoofbench/stats.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "json.hpp"
#include "oracles.h"
#include "spoofbench/error.h"
#include "test_util.h"

namespace spoofbench {
namespace {

using Vec = std::vector<double>;

Vec RandomVec(std::mt19937_64 &rng, std::size_t n) {
  std::normal_distribution<double> g(0, 1);
  Vec v(n);
  for (auto &x : v) x = g(rng);
  return v;
}

TEST(Pearson, TrivialCases) {
  EXPECT_DOUBLE_EQ(Pearson(Vec{1, 2, 3}, Vec{1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(Pearson(Vec{1, 2, 3}, Vec{3, 2, 1}), -1.0);
}

TEST(Pearson, FourPointExampleAgreesWithTextbookForm) {
  // Sxy = 5.5, Sxx = 5, Syy = 8.75, so r = 0.8315. The round 0.8 is the
  // Spearman value for the same pair.
  const Vec x{1, 2, 3, 4}, y{1, 3, 2, 5};
  EXPECT_NEAR(Pearson(x, y), testing::TextbookPearson(x, y), 1e-12);
  EXPECT_NEAR(Pearson(x, y), 5.5 / std::sqrt(5.0 * 8.75), 1e-12);
  EXPECT_NEAR(Spearman(x, y), 0.8, 1e-12);
}

TEST(Pearson, Errors) {
  EXPECT_THROW(Pearson(Vec{1, 2}, Vec{1, 2, 3}), DataError);
  EXPECT_THROW(Pearson(Vec{1}, Vec{1}), DataError);
  EXPECT_THROW(Pearson(Vec{1, 1, 1}, Vec{1, 2, 3}), DataError);
}

TEST(Pearson, AffineInvariance) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    Vec x = RandomVec(rng, 12), y = RandomVec(rng, 12);
    const double r = Pearson(x, y);
    Vec x2 = x, y2 = y;
    for (auto &v : x2) v = 3.5 * v - 7;
    for (auto &v : y2) v = -0.25 * v + 2;
    EXPECT_NEAR(Pearson(x2, y), r, 1e-12);
    EXPECT_NEAR(Pearson(x, y2), -r, 1e-12);
    EXPECT_NEAR(r, testing::TextbookPearson(x, y), 1e-10);
  }
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(Spearman(Vec{1, 2, 3}, Vec{3, 1, 2}), -0.5);
  EXPECT_DOUBLE_EQ(Spearman(Vec{1, 2, 3, 4}, Vec{1, 8, 27, 64}), 1.0);
  EXPECT_EQ(FractionalRanks(Vec{1, 1, 2}), (Vec{1.5, 1.5, 3}));
  EXPECT_DOUBLE_EQ(Spearman(Vec{1, 1, 2}, Vec{1, 2, 3}),
                   Pearson(Vec{1.5, 1.5, 3}, Vec{1, 2, 3}));
}

TEST(Spearman, MatchesTieFreeFormula) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    Vec x = RandomVec(rng, 15), y = RandomVec(rng, 15);
    EXPECT_NEAR(Spearman(x, y), testing::TieFreeSpearman(x, y), 1e-12);
  }
}

TEST(Kendall, Examples) {
  EXPECT_NEAR(KendallTau(Vec{1, 2, 3}, Vec{3, 1, 2}), -1.0 / 3, 1e-15);
  EXPECT_DOUBLE_EQ(KendallTau(Vec{4, 1, 7}, Vec{4, 1, 7}), 1.0);
  EXPECT_DOUBLE_EQ(KendallTau(Vec{1, 2, 3, 4}, Vec{4, 3, 2, 1}), -1.0);
  EXPECT_THROW(KendallTau(Vec{2, 2, 2}, Vec{1, 2, 3}), DataError);
}

TEST(Kendall, TauBTieCorrection) {
  // x ties one pair: n0 = 6, n1 = 1, n2 = 0; concordant 5, discordant 0.
  EXPECT_NEAR(KendallTau(Vec{1, 1, 2, 3}, Vec{1, 2, 3, 4}), 5.0 / std::sqrt(5.0 * 6.0), 1e-12);
}

TEST(RankStatistics, InvariantUnderIncreasingMaps) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    Vec x = RandomVec(rng, 14), y = RandomVec(rng, 14);
    Vec fx = x;
    for (auto &v : fx) v = std::exp(v) + v * v * v;
    EXPECT_EQ(Spearman(fx, y), Spearman(x, y));
    EXPECT_EQ(KendallTau(fx, y), KendallTau(x, y));
    EXPECT_NEAR(KendallTau(x, y), testing::TieFreeKendall(x, y), 1e-12);
  }
}

TEST(DistanceCorrelation, Examples) {
  EXPECT_NEAR(DistanceCorrelation(Vec{1, 5, 2, 8}, Vec{1, 5, 2, 8}), 1.0, 1e-12);
  EXPECT_EQ(DistanceCorrelation(Vec{1, 2, 3}, Vec{4, 4, 4}), 0.0);
  const double d = DistanceCorrelation(Vec{1, 2, 3, 4}, Vec{1, 4, 9, 16});
  EXPECT_GT(d, 0.95);
  EXPECT_LE(d, 1.0);
}

TEST(DistanceCorrelation, MatchesExplicitOracleAndAffineMaps) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    Vec x = RandomVec(rng, 10), y = RandomVec(rng, 10);
    const double d = DistanceCorrelation(x, y);
    EXPECT_NEAR(d, testing::ExplicitDistanceCorrelation(x, y), 1e-12);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    Vec lin = x;
    for (auto &v : lin) v = 2 - 4 * v;
    EXPECT_NEAR(DistanceCorrelation(x, lin), 1.0, 1e-12);
  }
}

TEST(MutualInformation, Examples) {
  EXPECT_NEAR(MutualInformation(Vec{0, 1, 2, 3}, Vec{0, 1, 2, 3}, 4), std::log(4.0), 1e-12);
  EXPECT_EQ(MutualInformation(Vec{5, 5, 5}, Vec{1, 2, 3}, 4), 0.0);
  EXPECT_THROW(MutualInformation(Vec{1, 2}, Vec{1, 2}, 1), DataError);
}

TEST(MutualInformation, IndependentUniformsAreNearZero) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  Vec x(10000), y(10000);
  for (auto &v : x) v = u(rng);
  for (auto &v : y) v = u(rng);
  const double mi = MutualInformation(x, y, 10);
  EXPECT_GE(mi, 0.0);
  EXPECT_LT(mi, 0.02);
}

TEST(MutualInformation, SymmetricAndNonNegative) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 30; ++i) {
    Vec x = RandomVec(rng, 40), y = RandomVec(rng, 40);
    const double a = MutualInformation(x, y, 6), b = MutualInformation(y, x, 6);
    EXPECT_NEAR(a, b, 1e-12);
    EXPECT_GE(a, 0.0);
  }
  EXPECT_EQ(DefaultMiBins(3), 2u);
  EXPECT_EQ(DefaultMiBins(15), 3u);
  EXPECT_EQ(DefaultMiBins(100), 10u);
}

TEST(Ccc, Examples) {
  const Vec x{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(Ccc(x, x), 1.0);
  Vec shifted = x;
  for (auto &v : shifted) v += 10;
  EXPECT_NEAR(Ccc(x, shifted), 1.0 / 26, 1e-15);
  EXPECT_DOUBLE_EQ(Ccc(Vec{-2, -1, 0, 1, 2}, Vec{2, 1, 0, -1, -2}), -1.0);
  EXPECT_THROW(Ccc(Vec{3, 3}, Vec{3, 3}), DataError);
}

TEST(Ccc, BoundedByPearsonAndMatchesClosedForm) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    Vec x = RandomVec(rng, 9), y = RandomVec(rng, 9);
    for (auto &v : y) v = v * 2 + 0.3;
    const double c = Ccc(x, y);
    EXPECT_LE(std::abs(c), std::abs(Pearson(x, y)) + 1e-12);
    EXPECT_NEAR(c, testing::ClosedFormCcc(x, y), 1e-12);
  }
}

TEST(AllStatistics, PermutationEquivariant) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    Vec x = RandomVec(rng, 16), y = RandomVec(rng, 16);
    std::vector<std::size_t> perm(16);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Vec px(16), py(16);
    for (std::size_t k = 0; k < 16; ++k) {
      px[k] = x[perm[k]];
      py[k] = y[perm[k]];
    }
    EXPECT_NEAR(Pearson(px, py), Pearson(x, y), 1e-12);
    EXPECT_NEAR(Spearman(px, py), Spearman(x, y), 1e-12);
    EXPECT_NEAR(KendallTau(px, py), KendallTau(x, y), 1e-12);
    EXPECT_NEAR(DistanceCorrelation(px, py), DistanceCorrelation(x, y), 1e-12);
    EXPECT_NEAR(MutualInformation(px, py, 4), MutualInformation(x, y, 4), 1e-12);
    EXPECT_NEAR(Ccc(px, py), Ccc(x, y), 1e-12);
  }
}

TEST(EerMatrix, AverageIsRowMean) {
  EerMatrix m({"a", "b"}, {"d1", "d2", "d3"}, {{0.1, 0.2, 0.3}, {0.0, 0.5, 1.0}});
  EXPECT_NEAR(m.average()[0], 0.2, 1e-15);
  EXPECT_NEAR(m.average()[1], 0.5, 1e-15);
  EXPECT_EQ(m.Column(1), (Vec{0.2, 0.5}));
  EerMatrix s = m.SelectSystems({"b"});
  EXPECT_EQ(s.system_ids(), (std::vector<std::string>{"b"}));
  EXPECT_THROW(m.SelectSystems({"zz"}), DataError);
  EXPECT_THROW(EerMatrix({"a"}, {"d"}, {{0.1, 0.2}}), DataError);
  EXPECT_THROW(EerMatrix({"a", "a"}, {"d"}, {{0.1}, {0.2}}), DataError);
}

TEST(EerMatrix, PublishedAverages) {
  EerMatrix m = ParseEerMatrixCsv(testing::OpenSourceMatrixCsv());
  ASSERT_EQ(m.system_ids().size(), 12u);
  EXPECT_NEAR(m.average()[0], 13.84, 0.01);  // XLSR+SLS
}

TEST(EerMatrixCsv, IgnoresSummaryColumnsAndRejectsBadCells) {
  EerMatrix m = ParseEerMatrixCsv(
      "system_id,params_m,d1,d2,average_eer,pooled_eer\n"
      "a,300,0.1,0.2,0.15,0.2\nb,,0.3,0.4,0.35,0.4\n");
  EXPECT_EQ(m.dataset_ids(), (std::vector<std::string>{"d1", "d2"}));
  EXPECT_THROW(ParseEerMatrixCsv("s,d1\na,0.1,0.2\n"), DataError);
  EXPECT_THROW(ParseEerMatrixCsv("s,d1\na,x\n", "m.csv"), DataError);
  EXPECT_THROW(ParseEerMatrixCsv(""), DataError);
  try {
    ParseEerMatrixCsv("s,d1\na,0.1\nb,abc\n", "m.csv");
    FAIL();
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("m.csv:3:"), std::string::npos) << e.what();
  }
}

TEST(CorrelateMatrix, ColumnsEqualToAverage) {
  EerMatrix m({"a", "b", "c", "d"}, {"x", "y"},
              {{0.1, 0.1}, {0.3, 0.3}, {0.2, 0.2}, {0.6, 0.6}});
  CorrelationReport r = CorrelateMatrix(m);
  for (const auto &row : r.rows) {
    EXPECT_NEAR(*row[CorrelationMetric::kPearson].value, 1.0, 1e-12);
    EXPECT_NEAR(*row[CorrelationMetric::kSpearman].value, 1.0, 1e-12);
    EXPECT_NEAR(*row[CorrelationMetric::kCcc].value, 1.0, 1e-12);
  }
}

TEST(CorrelateMatrix, ShapeAndDegenerateColumn) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 0.5);
  std::vector<std::vector<double>> v(3, std::vector<double>(2));
  for (auto &row : v)
    for (auto &x : row) x = u(rng);
  CorrelationReport r = CorrelateMatrix(EerMatrix({"a", "b", "c"}, {"d1", "d2"}, v));
  ASSERT_EQ(r.rows.size(), 2u);
  for (const auto &row : r.rows)
    for (const auto &cell : row.cells) EXPECT_TRUE(cell.value.has_value());

  EerMatrix flat({"a", "b", "c"}, {"const", "vary"}, {{0.2, 0.1}, {0.2, 0.5}, {0.2, 0.3}});
  r = CorrelateMatrix(flat);
  EXPECT_FALSE(r.rows[0][CorrelationMetric::kPearson].value);
  EXPECT_NE(r.rows[0][CorrelationMetric::kPearson].reason.find("zero variance"),
            std::string::npos);
  EXPECT_EQ(*r.rows[0][CorrelationMetric::kDistanceCorr].value, 0.0);
  EXPECT_TRUE(r.rows[1][CorrelationMetric::kPearson].value);
  EXPECT_NE(CorrelationReportCsv(r).find("const,NA,NA,NA,0.0000"), std::string::npos)
      << CorrelationReportCsv(r);
  auto j = nlohmann::json::parse(CorrelationReportJson(r));
  EXPECT_TRUE(j["rows"][0]["pearson"].is_null());
  EXPECT_TRUE(j["rows"][0]["null_reasons"].contains("pearson"));
  EXPECT_FALSE(j["rows"][1].contains("null_reasons"));
}

TEST(CorrelateMatrix, NeedsThreeSystems) {
  EXPECT_THROW(CorrelateMatrix(EerMatrix({"a", "b"}, {"d"}, {{0.1}, {0.2}})), DataError);
}

TEST(CorrelateMatrix, LibriSeVocAmongTopTwoByPearson) {
  CorrelationReport r = CorrelateMatrix(ParseEerMatrixCsv(testing::OpenSourceMatrixCsv()));
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto &row : r.rows)
    ranked.emplace_back(*row[CorrelationMetric::kPearson].value, row.dataset_id);
  std::sort(ranked.rbegin(), ranked.rend());
  EXPECT_TRUE(ranked[0].second == "LibriSeVoc" || ranked[1].second == "LibriSeVoc");
}

TEST(CorrelateMatrix, ParallelMatchesSerial) {
  EerMatrix m = ParseEerMatrixCsv(testing::OpenSourceMatrixCsv());
  EXPECT_EQ(CorrelationReportJson(CorrelateMatrix(m, 0, 1)),
            CorrelationReportJson(CorrelateMatrix(m, 0, 8)));
}

}  // namespace
}  // namespace spoofbench

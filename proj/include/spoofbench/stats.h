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

// Association statistics between a dataset's EER column and the per-system
// average EER.

#ifndef SPOOFBENCH_STATS_H_
#define SPOOFBENCH_STATS_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spoofbench {

/// Sample Pearson r. Throws DataError on length mismatch, n < 2 or a
/// constant argument.
double Pearson(std::span<const double> x, std::span<const double> y);

/// Pearson of fractional ranks; ties share the mean of their rank span.
double Spearman(std::span<const double> x, std::span<const double> y);

/// Kendall tau-b. Throws DataError when every pair is tied in x or in y.
double KendallTau(std::span<const double> x, std::span<const double> y);

/// Szekely's distance correlation in [0, 1]; 0 when either distance
/// variance vanishes.
double DistanceCorrelation(std::span<const double> x, std::span<const double> y);

/// Plug-in mutual information (nats) over an equal-width bins x bins
/// histogram spanning each variable's observed range. 0 when either range
/// is degenerate.
double MutualInformation(std::span<const double> x, std::span<const double> y,
                         std::size_t bins);
/// max(2, floor(sqrt(n))).
std::size_t DefaultMiBins(std::size_t n);

/// Lin's concordance correlation coefficient (population moments).
double Ccc(std::span<const double> x, std::span<const double> y);

/// 1-based fractional ranks.
std::vector<double> FractionalRanks(std::span<const double> x);

/// Systems x datasets EER grid. `average` is the row mean.
class EerMatrix {
 public:
  EerMatrix(std::vector<std::string> system_ids,
            std::vector<std::string> dataset_ids,
            std::vector<std::vector<double>> values);

  const std::vector<std::string> &system_ids() const { return system_ids_; }
  const std::vector<std::string> &dataset_ids() const { return dataset_ids_; }
  double at(std::size_t system, std::size_t dataset) const {
    return values_[system][dataset];
  }
  std::vector<double> Column(std::size_t dataset) const;
  const std::vector<double> &average() const { return average_; }

  /// Rows restricted to the given systems, in the given order.
  EerMatrix SelectSystems(const std::vector<std::string> &ids) const;

 private:
  std::vector<std::string> system_ids_;
  std::vector<std::string> dataset_ids_;
  std::vector<std::vector<double>> values_;
  std::vector<double> average_;
};

/// CSV with a header row ("system,<dataset>,...") and the system id in the
/// first column. Columns named average_eer, pooled_eer or params_m (as
/// written by the leaderboard) are ignored.
EerMatrix ParseEerMatrixCsv(const std::string &text,
                            const std::string &source_name = "<memory>");

enum class CorrelationMetric {
  kPearson,
  kSpearman,
  kKendallTau,
  kDistanceCorr,
  kMutualInfo,
  kCcc,
};
inline constexpr std::size_t kNumCorrelationMetrics = 6;
const char *ToString(CorrelationMetric metric);

struct CorrelationCell {
  std::optional<double> value;
  std::string reason;  // set when value is empty
};

struct CorrelationRow {
  std::string dataset_id;
  std::array<CorrelationCell, kNumCorrelationMetrics> cells;

  const CorrelationCell &operator[](CorrelationMetric m) const {
    return cells[static_cast<std::size_t>(m)];
  }
};

struct CorrelationReport {
  std::vector<CorrelationRow> rows;  // in matrix dataset order
  std::size_t bins = 0;
};

/// Every dataset column against the average-EER vector. Needs >= 3 systems
/// (ConfigError otherwise). A statistic that is undefined for a column
/// becomes an empty cell with a reason. bins == 0 selects DefaultMiBins.
CorrelationReport CorrelateMatrix(const EerMatrix &m, std::size_t bins = 0,
                                  unsigned jobs = 1);

/// Rows = datasets, 4 decimals, "NA" for empty cells.
std::string CorrelationReportCsv(const CorrelationReport &report);
std::string CorrelationReportJson(const CorrelationReport &report);

}  // namespace spoofbench

#endif  // SPOOFBENCH_STATS_H_

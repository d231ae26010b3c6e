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

// Detection metrics over joined (label, score) lists. Scores are always
// higher-is-bonafide here; Join() takes care of polarity.
//
// A trial is accepted as bonafide at threshold t iff score >= t.

#ifndef SPOOFBENCH_METRICS_H_
#define SPOOFBENCH_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "spoofbench/protocol.h"

namespace spoofbench {

/// FAR/FRR at ascending thresholds. The first threshold lies below every
/// score (FAR = 1, FRR = 0), the last above every score (FAR = 0, FRR = 1),
/// and the ones in between are midpoints of consecutive distinct scores.
struct RocCurve {
  std::vector<double> thresholds;
  std::vector<double> far;  // fraction of spoof trials with score >= t
  std::vector<double> frr;  // fraction of bonafide trials with score < t
};

struct OperatingPoint {
  double eer = 0.0;
  double threshold = 0.0;
};

struct Confusion {
  std::size_t tp = 0;  // bonafide accepted
  std::size_t fn = 0;  // bonafide rejected
  std::size_t fp = 0;  // spoof accepted
  std::size_t tn = 0;  // spoof rejected
};

struct ThresholdMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion counts;
};

struct EvalReport {
  std::string system_id;
  std::string dataset_id;
  double eer = 0.0;
  double eer_threshold = 0.0;
  double auc = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
  double decision_threshold = 0.0;
  std::size_t n_bonafide = 0;
  std::size_t n_spoof = 0;

  bool operator==(const EvalReport &) const = default;
};

/// Throws DataError unless the curve satisfies the RocCurve contract.
void ValidateRoc(const RocCurve &curve);

/// Throws DataError if either class is empty.
RocCurve ComputeRoc(std::span<const ScoredTrial> joined);
/// Same, from per-class scores. The vectors are sorted in place.
RocCurve ComputeRoc(std::vector<double> &bonafide, std::vector<double> &spoof);

/// Equal error rate: the first crossing of FAR and FRR along the curve,
/// linearly interpolated between the bracketing points. If no crossing
/// exists, (FAR + FRR) / 2 at the point minimising |FAR - FRR|.
OperatingPoint ComputeEer(const RocCurve &curve);

/// EER of the concatenation of all sets under a single global threshold.
/// No per-set normalisation is applied.
OperatingPoint PooledEer(std::span<const std::span<const ScoredTrial>> sets);

/// Trapezoidal area under TPR = 1 - FRR against FAR.
double ComputeAuc(const RocCurve &curve);

/// Bonafide is the positive class. F1 is 0 when precision + recall is 0;
/// precision is 0 when nothing is accepted.
ThresholdMetrics ComputeThresholdMetrics(std::span<const ScoredTrial> joined,
                                         double threshold);

/// Full metric bundle. Accuracy and F1 are taken at decision_threshold when
/// given, otherwise at the EER threshold.
EvalReport Evaluate(const std::string &system_id, const std::string &dataset_id,
                    std::span<const ScoredTrial> joined,
                    std::optional<double> decision_threshold = std::nullopt);

void to_json(nlohmann::json &j, const EvalReport &r);
void from_json(const nlohmann::json &j, EvalReport &r);

}  // namespace spoofbench

#endif  // SPOOFBENCH_METRICS_H_

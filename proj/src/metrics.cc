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

#include <algorithm>
#include <cmath>
#include <limits>

#include "spoofbench/error.h"

namespace spoofbench {

namespace {

double Below(double v) {
  double t = v - 1.0;
  return t < v ? t : std::nextafter(v, -std::numeric_limits<double>::infinity());
}

double Above(double v) {
  double t = v + 1.0;
  return t > v ? t : std::nextafter(v, std::numeric_limits<double>::infinity());
}

// Splits a threshold strictly between a < b, so that a is rejected and b
// accepted.
double Midpoint(double a, double b) {
  double m = a / 2 + b / 2;
  return m > a ? m : b;
}

}  // namespace

void ValidateRoc(const RocCurve &c) {
  const std::size_t n = c.thresholds.size();
  if (n < 2 || c.far.size() != n || c.frr.size() != n)
    throw DataError("ROC curve needs >= 2 points of equal-length sequences");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(c.far[i] >= 0 && c.far[i] <= 1 && c.frr[i] >= 0 && c.frr[i] <= 1))
      throw DataError("ROC rate outside [0, 1]");
    if (i > 0 && (c.thresholds[i] <= c.thresholds[i - 1] ||
                  c.far[i] > c.far[i - 1] || c.frr[i] < c.frr[i - 1]))
      throw DataError("ROC curve is not monotone in threshold");
  }
  if (c.far.front() != 1.0 || c.frr.front() != 0.0 || c.far.back() != 0.0 ||
      c.frr.back() != 1.0)
    throw DataError("ROC curve is missing its endpoints");
}

RocCurve ComputeRoc(std::vector<double> &bonafide, std::vector<double> &spoof) {
  if (bonafide.empty() || spoof.empty())
    throw DataError("ROC needs at least one bonafide and one spoof score");
  std::sort(bonafide.begin(), bonafide.end());
  std::sort(spoof.begin(), spoof.end());

  const double nb = static_cast<double>(bonafide.size());
  const double ns = static_cast<double>(spoof.size());
  const double lo = std::min(bonafide.front(), spoof.front());
  const double hi = std::max(bonafide.back(), spoof.back());

  RocCurve c;
  c.thresholds.push_back(Below(lo));
  c.far.push_back(1.0);
  c.frr.push_back(0.0);

  // Walk the merged distinct values; after consuming value v, the counts of
  // bonafide/spoof scores <= v give the rates at the threshold just above v.
  std::size_t ib = 0, is = 0;
  while (ib < bonafide.size() || is < spoof.size()) {
    double v = std::numeric_limits<double>::infinity();
    if (ib < bonafide.size()) v = bonafide[ib];
    if (is < spoof.size()) v = std::min(v, spoof[is]);
    while (ib < bonafide.size() && bonafide[ib] == v) ++ib;
    while (is < spoof.size() && spoof[is] == v) ++is;
    double next = std::numeric_limits<double>::infinity();
    if (ib < bonafide.size()) next = bonafide[ib];
    if (is < spoof.size()) next = std::min(next, spoof[is]);
    c.thresholds.push_back(v == hi ? Above(hi) : Midpoint(v, next));
    c.far.push_back(static_cast<double>(spoof.size() - is) / ns);
    c.frr.push_back(static_cast<double>(ib) / nb);
  }
  return c;
}

RocCurve ComputeRoc(std::span<const ScoredTrial> joined) {
  std::vector<double> bonafide, spoof;
  for (const auto &row : joined)
    (row.label == Label::kBonafide ? bonafide : spoof).push_back(row.score);
  return ComputeRoc(bonafide, spoof);
}

OperatingPoint ComputeEer(const RocCurve &c) {
  ValidateRoc(c);
  const std::size_t n = c.thresholds.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = c.far[i] - c.frr[i];
    if (d == 0.0) return {c.far[i], c.thresholds[i]};
    if (i + 1 < n) {
      const double d_next = c.far[i + 1] - c.frr[i + 1];
      if ((d > 0 && d_next < 0) || (d < 0 && d_next > 0)) {
        const double s = d / (d - d_next);
        return {c.far[i] + s * (c.far[i + 1] - c.far[i]),
                c.thresholds[i] + s * (c.thresholds[i + 1] - c.thresholds[i])};
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(c.far[i] - c.frr[i]) < std::abs(c.far[best] - c.frr[best]))
      best = i;
  return {(c.far[best] + c.frr[best]) / 2, c.thresholds[best]};
}

OperatingPoint PooledEer(std::span<const std::span<const ScoredTrial>> sets) {
  if (sets.empty()) throw DataError("pooled EER needs at least one set");
  std::size_t nb = 0, ns = 0;
  for (const auto &set : sets)
    for (const auto &row : set) ++(row.label == Label::kBonafide ? nb : ns);
  if (nb == 0 || ns == 0)
    throw DataError("pooled trials contain only one class");
  std::vector<double> bonafide, spoof;
  bonafide.reserve(nb);
  spoof.reserve(ns);
  for (const auto &set : sets)
    for (const auto &row : set)
      (row.label == Label::kBonafide ? bonafide : spoof).push_back(row.score);
  return ComputeEer(ComputeRoc(bonafide, spoof));
}

double ComputeAuc(const RocCurve &c) {
  ValidateRoc(c);
  double area = 0.0;
  // FAR is non-increasing along the curve, so walk it backwards.
  for (std::size_t i = c.far.size() - 1; i > 0; --i) {
    const double x0 = c.far[i], x1 = c.far[i - 1];
    const double y0 = 1.0 - c.frr[i], y1 = 1.0 - c.frr[i - 1];
    area += (x1 - x0) * (y0 + y1) / 2;
  }
  return std::clamp(area, 0.0, 1.0);
}

ThresholdMetrics ComputeThresholdMetrics(std::span<const ScoredTrial> joined,
                                         double threshold) {
  ThresholdMetrics m;
  Confusion &k = m.counts;
  for (const auto &row : joined) {
    const bool accept = row.score >= threshold;
    if (row.label == Label::kBonafide) ++(accept ? k.tp : k.fn);
    else ++(accept ? k.fp : k.tn);
  }
  const double n = static_cast<double>(joined.size());
  m.accuracy = n > 0 ? static_cast<double>(k.tp + k.tn) / n : 0.0;
  m.precision = k.tp + k.fp > 0
                    ? static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fp)
                    : 0.0;
  m.recall = k.tp + k.fn > 0
                 ? static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fn)
                 : 0.0;
  m.f1 = m.precision + m.recall > 0
             ? 2 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

EvalReport Evaluate(const std::string &system_id, const std::string &dataset_id,
                    std::span<const ScoredTrial> joined,
                    std::optional<double> decision_threshold) {
  RocCurve curve = ComputeRoc(joined);
  OperatingPoint op = ComputeEer(curve);
  EvalReport r;
  r.system_id = system_id;
  r.dataset_id = dataset_id;
  r.eer = op.eer;
  r.eer_threshold = op.threshold;
  r.auc = ComputeAuc(curve);
  r.decision_threshold = decision_threshold.value_or(op.threshold);
  ThresholdMetrics tm = ComputeThresholdMetrics(joined, r.decision_threshold);
  r.accuracy = tm.accuracy;
  r.f1 = tm.f1;
  r.n_bonafide = tm.counts.tp + tm.counts.fn;
  r.n_spoof = tm.counts.fp + tm.counts.tn;
  return r;
}

void to_json(nlohmann::json &j, const EvalReport &r) {
  j = nlohmann::json{{"system_id", r.system_id},
                     {"dataset_id", r.dataset_id},
                     {"eer", r.eer},
                     {"eer_threshold", r.eer_threshold},
                     {"auc", r.auc},
                     {"accuracy", r.accuracy},
                     {"f1", r.f1},
                     {"decision_threshold", r.decision_threshold},
                     {"n_bonafide", r.n_bonafide},
                     {"n_spoof", r.n_spoof}};
}

void from_json(const nlohmann::json &j, EvalReport &r) {
  j.at("system_id").get_to(r.system_id);
  j.at("dataset_id").get_to(r.dataset_id);
  j.at("eer").get_to(r.eer);
  j.at("eer_threshold").get_to(r.eer_threshold);
  j.at("auc").get_to(r.auc);
  j.at("accuracy").get_to(r.accuracy);
  j.at("f1").get_to(r.f1);
  j.at("decision_threshold").get_to(r.decision_threshold);
  j.at("n_bonafide").get_to(r.n_bonafide);
  j.at("n_spoof").get_to(r.n_spoof);
}

}  // namespace spoofbench

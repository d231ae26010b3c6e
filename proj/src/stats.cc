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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "spoofbench/error.h"
#include "spoofbench/parallel.h"

namespace spoofbench {

namespace {

void CheckPair(std::span<const double> x, std::span<const double> y,
               const char *what) {
  if (x.size() != y.size())
    throw DataError(std::string(what) + ": length mismatch (" +
                    std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
  if (x.size() < 2)
    throw DataError(std::string(what) + ": needs at least 2 observations");
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Double-centred pairwise distance matrix, row-major n x n.
std::vector<double> CentredDistances(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> a(n * n);
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = std::abs(v[i] - v[j]);
      row_mean[i] += a[i * n + j];
    }
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  // The matrix is symmetric, so column means equal row means.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i * n + j] += grand - row_mean[i] - row_mean[j];
  return a;
}

double MeanProduct(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s / static_cast<double>(a.size());
}

std::vector<std::size_t> BinIndices(std::span<const double> v, std::size_t bins,
                                    bool &degenerate) {
  auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it, hi = *hi_it;
  degenerate = !(hi > lo);
  std::vector<std::size_t> idx(v.size(), 0);
  if (degenerate) return idx;
  const double width = hi - lo;
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto b = static_cast<std::size_t>((v[i] - lo) / width *
                                      static_cast<double>(bins));
    idx[i] = std::min(b, bins - 1);
  }
  return idx;
}

std::string Trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    auto comma = line.find(',', pos);
    cells.push_back(Trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cells;
}

// Rounds to 4 decimals; a value that rounds to zero prints without a sign.
double Round4(double v) {
  const double r = std::round(v * 1e4) / 1e4;
  return r == 0.0 ? 0.0 : r;
}

std::string Fixed4(double v) {
  v = Round4(v);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

double Pearson(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y, "pearson");
  const double mx = Mean(x), my = Mean(y);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  // Test constancy on the raw values: the mean of a constant vector can carry
  // rounding residue that leaves a tiny nonzero sum of squares.
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v[0]; });
  };
  if (sxx == 0.0 || syy == 0.0 || constant(x) || constant(y))
    throw DataError("pearson: zero variance input");
  // The n - 1 divisors of the sample covariance and variances cancel.
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> FractionalRanks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    // Positions i..j (0-based) share ranks i+1..j+1.
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y, "spearman");
  auto rx = FractionalRanks(x), ry = FractionalRanks(y);
  try {
    return Pearson(rx, ry);
  } catch (const DataError &) {
    throw DataError("spearman: zero variance input");
  }
}

double KendallTau(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y, "kendall_tau");
  const std::size_t n = x.size();
  long long concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0) ++tied_x;
      if (dy == 0) ++tied_y;
      if (dx == 0 || dy == 0) continue;
      ((dx > 0) == (dy > 0) ? concordant : discordant)++;
    }
  }
  const long long n0 = static_cast<long long>(n * (n - 1) / 2);
  if (tied_x == n0 || tied_y == n0)
    throw DataError("kendall_tau: all pairs tied");
  const double denom = std::sqrt(static_cast<double>(n0 - tied_x) *
                                 static_cast<double>(n0 - tied_y));
  return std::clamp(static_cast<double>(concordant - discordant) / denom, -1.0, 1.0);
}

double DistanceCorrelation(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y, "distance_corr");
  auto a = CentredDistances(x);
  auto b = CentredDistances(y);
  const double dcov2 = MeanProduct(a, b);
  const double dvar_x = MeanProduct(a, a);
  const double dvar_y = MeanProduct(b, b);
  if (dvar_x <= 0 || dvar_y <= 0) return 0.0;
  const double r2 = std::max(0.0, dcov2) / std::sqrt(dvar_x * dvar_y);
  return std::clamp(std::sqrt(r2), 0.0, 1.0);
}

std::size_t DefaultMiBins(std::size_t n) {
  return std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
}

double MutualInformation(std::span<const double> x, std::span<const double> y,
                         std::size_t bins) {
  CheckPair(x, y, "mutual_info");
  if (bins < 2) throw DataError("mutual_info: needs at least 2 bins");
  bool degenerate_x = false, degenerate_y = false;
  auto bx = BinIndices(x, bins, degenerate_x);
  auto by = BinIndices(y, bins, degenerate_y);
  if (degenerate_x || degenerate_y) return 0.0;

  const std::size_t n = x.size();
  std::vector<std::size_t> joint(bins * bins, 0), px(bins, 0), py(bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[bx[i] * bins + by[i]];
    ++px[bx[i]];
    ++py[by[i]];
  }
  const double total = static_cast<double>(n);
  double mi = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    for (std::size_t j = 0; j < bins; ++j) {
      const std::size_t c = joint[i * bins + j];
      if (c == 0) continue;
      // p(i,j) ln(p(i,j) / (p(i) p(j))) with counts: c/N ln(c N / (ci cj)).
      mi += static_cast<double>(c) / total *
            std::log(static_cast<double>(c) * total /
                     (static_cast<double>(px[i]) * static_cast<double>(py[j])));
    }
  }
  return std::max(0.0, mi);
}

double Ccc(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y, "ccc");
  const double n = static_cast<double>(x.size());
  const double mx = Mean(x), my = Mean(y);
  double vx = 0, vy = 0, cxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
    cxy += (x[i] - mx) * (y[i] - my);
  }
  vx /= n;
  vy /= n;
  cxy /= n;
  const double denom = vx + vy + (mx - my) * (mx - my);
  if (denom == 0.0) throw DataError("ccc: undefined for identical constant inputs");
  return std::clamp(2 * cxy / denom, -1.0, 1.0);
}

EerMatrix::EerMatrix(std::vector<std::string> system_ids,
                     std::vector<std::string> dataset_ids,
                     std::vector<std::vector<double>> values)
    : system_ids_(std::move(system_ids)),
      dataset_ids_(std::move(dataset_ids)),
      values_(std::move(values)) {
  if (dataset_ids_.empty()) throw DataError("EER matrix has no datasets");
  if (values_.size() != system_ids_.size())
    throw DataError("EER matrix row count does not match system ids");
  std::set<std::string> seen_systems(system_ids_.begin(), system_ids_.end());
  std::set<std::string> seen_datasets(dataset_ids_.begin(), dataset_ids_.end());
  if (seen_systems.size() != system_ids_.size())
    throw DataError("EER matrix has duplicate system ids");
  if (seen_datasets.size() != dataset_ids_.size())
    throw DataError("EER matrix has duplicate dataset ids");
  average_.reserve(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const auto &row = values_[i];
    if (row.size() != dataset_ids_.size())
      throw DataError("EER matrix row '" + system_ids_[i] + "' has " +
                      std::to_string(row.size()) + " cells, expected " +
                      std::to_string(dataset_ids_.size()));
    for (double v : row)
      if (!std::isfinite(v))
        throw DataError("EER matrix row '" + system_ids_[i] +
                        "' has a non-finite cell");
    average_.push_back(Mean(row));
  }
}

std::vector<double> EerMatrix::Column(std::size_t dataset) const {
  std::vector<double> col;
  col.reserve(values_.size());
  for (const auto &row : values_) col.push_back(row[dataset]);
  return col;
}

EerMatrix EerMatrix::SelectSystems(const std::vector<std::string> &ids) const {
  std::vector<std::vector<double>> rows;
  for (const auto &id : ids) {
    auto it = std::find(system_ids_.begin(), system_ids_.end(), id);
    if (it == system_ids_.end())
      throw DataError("unknown system '" + id + "' in subset filter");
    rows.push_back(values_[static_cast<std::size_t>(it - system_ids_.begin())]);
  }
  return EerMatrix(ids, dataset_ids_, std::move(rows));
}

EerMatrix ParseEerMatrixCsv(const std::string &text,
                            const std::string &source_name) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::vector<bool> keep;
  std::vector<std::string> systems, datasets;
  std::vector<std::vector<double>> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto cells = SplitCsvLine(line);
    if (header.empty()) {
      header = cells;
      if (header.size() < 2)
        throw DataError(AtLine(source_name, line_no,
                               "header needs an index column and at least one dataset"),
                        source_name);
      keep.assign(header.size(), false);
      for (std::size_t c = 1; c < header.size(); ++c) {
        const auto &name = header[c];
        if (name == "average_eer" || name == "pooled_eer" || name == "params_m")
          continue;
        if (name.empty())
          throw DataError(AtLine(source_name, line_no, "empty dataset name"),
                          source_name);
        keep[c] = true;
        datasets.push_back(name);
      }
      if (datasets.empty())
        throw DataError(AtLine(source_name, line_no, "no dataset columns"),
                        source_name);
      continue;
    }
    if (cells.size() != header.size())
      throw DataError(AtLine(source_name, line_no,
                             "ragged row: " + std::to_string(cells.size()) +
                                 " cells, header has " +
                                 std::to_string(header.size())),
                      source_name);
    if (cells[0].empty())
      throw DataError(AtLine(source_name, line_no, "empty system id"), source_name);
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (!keep[c]) continue;
      double v = 0;
      const auto &cell = cells[c];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        throw DataError(AtLine(source_name, line_no,
                               "non-numeric cell '" + cell + "' in column '" +
                                   header[c] + "'"),
                        source_name);
      row.push_back(v);
    }
    systems.push_back(cells[0]);
    values.push_back(std::move(row));
  }
  if (header.empty()) throw DataError(source_name + ": empty matrix", source_name);
  return EerMatrix(std::move(systems), std::move(datasets), std::move(values));
}

const char *ToString(CorrelationMetric metric) {
  switch (metric) {
    case CorrelationMetric::kPearson: return "pearson";
    case CorrelationMetric::kSpearman: return "spearman";
    case CorrelationMetric::kKendallTau: return "kendall_tau";
    case CorrelationMetric::kDistanceCorr: return "distance_corr";
    case CorrelationMetric::kMutualInfo: return "mutual_info";
    case CorrelationMetric::kCcc: return "ccc";
  }
  return "?";
}

CorrelationReport CorrelateMatrix(const EerMatrix &m, std::size_t bins,
                                  unsigned jobs) {
  const std::size_t n = m.system_ids().size();
  if (n < 3)
    throw DataError("correlation analysis needs at least 3 systems, got " +
                    std::to_string(n));
  CorrelationReport report;
  report.bins = bins == 0 ? DefaultMiBins(n) : bins;
  if (report.bins < 2) throw ConfigError("bins must be at least 2");
  report.rows.resize(m.dataset_ids().size());
  const auto &avg = m.average();
  ParallelFor(m.dataset_ids().size(), jobs, [&](std::size_t d) {
    CorrelationRow &row = report.rows[d];
    row.dataset_id = m.dataset_ids()[d];
    const auto col = m.Column(d);
    auto fill = [&](CorrelationMetric metric, auto &&compute) {
      auto &cell = row.cells[static_cast<std::size_t>(metric)];
      try {
        cell.value = compute();
      } catch (const DataError &e) {
        cell.reason = e.what();
      }
    };
    fill(CorrelationMetric::kPearson, [&] { return Pearson(col, avg); });
    fill(CorrelationMetric::kSpearman, [&] { return Spearman(col, avg); });
    fill(CorrelationMetric::kKendallTau, [&] { return KendallTau(col, avg); });
    fill(CorrelationMetric::kDistanceCorr,
         [&] { return DistanceCorrelation(col, avg); });
    fill(CorrelationMetric::kMutualInfo,
         [&] { return MutualInformation(col, avg, report.bins); });
    fill(CorrelationMetric::kCcc, [&] { return Ccc(col, avg); });
  });
  return report;
}

std::string CorrelationReportCsv(const CorrelationReport &report) {
  std::string out = "dataset";
  for (std::size_t k = 0; k < kNumCorrelationMetrics; ++k)
    out += std::string(",") + ToString(static_cast<CorrelationMetric>(k));
  out += '\n';
  for (const auto &row : report.rows) {
    out += row.dataset_id;
    for (const auto &cell : row.cells)
      out += "," + (cell.value ? Fixed4(*cell.value) : std::string("NA"));
    out += '\n';
  }
  return out;
}

std::string CorrelationReportJson(const CorrelationReport &report) {
  using nlohmann::ordered_json;
  ordered_json rows = ordered_json::array();
  for (const auto &row : report.rows) {
    ordered_json r;
    r["dataset_id"] = row.dataset_id;
    ordered_json reasons = ordered_json::object();
    for (std::size_t k = 0; k < kNumCorrelationMetrics; ++k) {
      const auto &cell = row.cells[k];
      const char *name = ToString(static_cast<CorrelationMetric>(k));
      if (cell.value) {
        r[name] = Round4(*cell.value);
      } else {
        r[name] = nullptr;
        reasons[name] = cell.reason;
      }
    }
    if (!reasons.empty()) r["null_reasons"] = reasons;
    rows.push_back(std::move(r));
  }
  ordered_json doc;
  doc["bins"] = report.bins;
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

}  // namespace spoofbench

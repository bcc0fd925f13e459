/*
 * Copyright 2026 The crbart Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "crbart/discrete_time.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace crbart {

namespace {

std::string RecordLabel(std::size_t i) { return "record " + std::to_string(i + 1); }

// log of p^y (1-p)^(1-y) with 0 log 0 = 0.
double BernoulliLog(int y, double p) { return y == 1 ? std::log(p) : std::log1p(-p); }

void AppendRow(LongBinaryData& out, double t, const std::vector<double>& x, int y, int subject,
               int j) {
  const Eigen::Index r = static_cast<Eigen::Index>(out.y.size());
  for (std::size_t k = 0; k < x.size(); ++k) out.x(r, static_cast<Eigen::Index>(k + 1)) = x[k];
  out.x(r, 0) = t;
  out.y.push_back(y);
  out.subject.push_back(subject);
  out.grid_index.push_back(j);
}

std::vector<int> AtRiskCounts(std::span<const CompetingRisksRecord> records, const TimeGrid& grid) {
  ValidateRecords(records);
  grid.Validate();
  std::vector<int> n(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    n[i] = grid.CountAtOrBelow(records[i].time);
    if (n[i] == 0) {
      throw InputError(RecordLabel(i) + " has time " + std::to_string(records[i].time) +
                       " before the first grid time");
    }
  }
  return n;
}

LongBinaryData EmptyLong(std::size_t rows, std::size_t p, const std::vector<int>& n) {
  LongBinaryData out;
  out.x.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p + 1));
  out.y.reserve(rows);
  out.subject.reserve(rows);
  out.grid_index.reserve(rows);
  out.n_at_risk = n;
  return out;
}

std::size_t Covariates(std::span<const CompetingRisksRecord> records) {
  return records.empty() ? 0 : records.front().x.size();
}

void CheckTable(const HazardTable& p, const std::vector<int>& n, const char* name) {
  if (p.size() != n.size()) throw InputError(std::string(name) + " has wrong subject count");
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (static_cast<int>(p[i].size()) < n[i]) {
      throw InputError(std::string(name) + " is too short for subject " + std::to_string(i + 1));
    }
  }
}

}  // namespace

void ValidateRecords(std::span<const CompetingRisksRecord> records) {
  if (records.empty()) throw InputError("no records");
  const std::size_t p = records.front().x.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!(r.time > 0.0) || !std::isfinite(r.time)) {
      throw InputError(RecordLabel(i) + ": time must be positive and finite");
    }
    if (r.status != 0 && r.status != 1) throw InputError(RecordLabel(i) + ": status must be 0 or 1");
    if (r.status == 1 && r.cause != 1 && r.cause != 2) {
      throw InputError(RecordLabel(i) + ": an event needs cause 1 or 2");
    }
    if (r.status == 0 && r.cause != 0) {
      throw InputError(RecordLabel(i) + ": a censored record needs cause 0");
    }
    if (r.x.size() != p) throw InputError(RecordLabel(i) + ": covariate count differs from record 1");
    for (double v : r.x) {
      if (!std::isfinite(v)) throw InputError(RecordLabel(i) + ": non-finite covariate");
    }
  }
}

void TimeGrid::Validate() const {
  if (times.empty()) throw InputError("time grid is empty");
  if (!(times.front() > 0.0)) throw InputError("time grid must be positive");
  for (std::size_t j = 1; j < times.size(); ++j) {
    if (!(times[j] > times[j - 1])) throw InputError("time grid must be strictly increasing");
  }
}

int TimeGrid::CountAtOrBelow(double t) const {
  return static_cast<int>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

TimeGrid BuildTimeGrid(std::span<const CompetingRisksRecord> records) {
  if (records.empty()) throw InputError("no records");
  TimeGrid grid;
  grid.times.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!(records[i].time > 0.0)) throw InputError(RecordLabel(i) + ": time must be positive");
    grid.times.push_back(records[i].time);
  }
  std::sort(grid.times.begin(), grid.times.end());
  grid.times.erase(std::unique(grid.times.begin(), grid.times.end()), grid.times.end());
  return grid;
}

CoarsenedCohort CoarsenGrid(std::span<const CompetingRisksRecord> records, double unit) {
  if (!(unit > 0.0) || !std::isfinite(unit)) throw InputError("coarsening unit must be positive");
  CoarsenedCohort out;
  out.records.assign(records.begin(), records.end());
  for (auto& r : out.records) {
    // Ratios within 1e-9 of an integer stay on that integer.
    const double k = std::max(1.0, std::ceil(r.time / unit - 1e-9));
    r.time = unit * k;
  }
  out.grid = BuildTimeGrid(out.records);
  return out;
}

CoarsenedCohort CoarsenToEdges(std::span<const CompetingRisksRecord> records,
                               std::span<const double> edges) {
  TimeGrid all{std::vector<double>(edges.begin(), edges.end())};
  all.Validate();
  CoarsenedCohort out;
  out.records.assign(records.begin(), records.end());
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    auto& r = out.records[i];
    const auto it = std::lower_bound(all.times.begin(), all.times.end(), r.time);
    if (it == all.times.end()) throw InputError(RecordLabel(i) + " lies beyond the last edge");
    r.time = *it;
  }
  out.grid = BuildTimeGrid(out.records);
  return out;
}

LongBinaryData ExpandSurvival(std::span<const CompetingRisksRecord> records, const TimeGrid& grid) {
  const auto n = AtRiskCounts(records, grid);
  std::size_t rows = 0;
  for (int v : n) rows += static_cast<std::size_t>(v);
  LongBinaryData out = EmptyLong(rows, Covariates(records), n);
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (int j = 1; j <= n[i]; ++j) {
      const int y = j == n[i] ? records[i].status : 0;
      AppendRow(out, grid.times[j - 1], records[i].x, y, static_cast<int>(i), j);
    }
  }
  return out;
}

CriskM1Data ExpandCriskM1(std::span<const CompetingRisksRecord> records, const TimeGrid& grid) {
  CriskM1Data out;
  out.any_event = ExpandSurvival(records, grid);
  const auto& n = out.any_event.n_at_risk;
  std::size_t events = 0;
  for (const auto& r : records) events += static_cast<std::size_t>(r.status);
  out.cause_given_event = EmptyLong(events, Covariates(records), n);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].status != 1) continue;
    AppendRow(out.cause_given_event, records[i].time, records[i].x, records[i].cause == 1 ? 1 : 0,
              static_cast<int>(i), n[i]);
  }
  return out;
}

CriskM2Data ExpandCriskM2(std::span<const CompetingRisksRecord> records, const TimeGrid& grid) {
  const auto n = AtRiskCounts(records, grid);
  std::size_t rows = 0;
  std::size_t cause1 = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    rows += static_cast<std::size_t>(n[i]);
    if (records[i].cause == 1) ++cause1;
  }
  const std::size_t p = Covariates(records);
  CriskM2Data out{EmptyLong(rows, p, n), EmptyLong(rows - cause1, p, n)};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    for (int j = 1; j <= n[i]; ++j) {
      const bool last = j == n[i];
      const int y1 = last && r.cause == 1 ? 1 : 0;
      const int y2 = last && r.cause == 2 ? 1 : 0;
      const double t = grid.times[j - 1];
      AppendRow(out.cause1, t, r.x, y1, static_cast<int>(i), j);
      if (y1 == 0) AppendRow(out.cause2, t, r.x, y2, static_cast<int>(i), j);
    }
  }
  return out;
}

std::vector<CompetingRisksRecord> ReconstructM1(const CriskM1Data& data, const TimeGrid& grid) {
  const auto& n = data.any_event.n_at_risk;
  std::vector<CompetingRisksRecord> out(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) out[i].time = grid.times[n[i] - 1];
  for (std::size_t r = 0; r < data.any_event.rows(); ++r) {
    if (data.any_event.y[r] == 1) out[data.any_event.subject[r]].status = 1;
  }
  for (std::size_t r = 0; r < data.cause_given_event.rows(); ++r) {
    out[data.cause_given_event.subject[r]].cause = data.cause_given_event.y[r] == 1 ? 1 : 2;
  }
  return out;
}

std::vector<CompetingRisksRecord> ReconstructM2(const CriskM2Data& data, const TimeGrid& grid) {
  const auto& n = data.cause1.n_at_risk;
  std::vector<CompetingRisksRecord> out(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) out[i].time = grid.times[n[i] - 1];
  for (std::size_t r = 0; r < data.cause1.rows(); ++r) {
    if (data.cause1.y[r] == 1) out[data.cause1.subject[r]] = {out[data.cause1.subject[r]].time, 1, 1, {}};
  }
  for (std::size_t r = 0; r < data.cause2.rows(); ++r) {
    if (data.cause2.y[r] == 1) out[data.cause2.subject[r]] = {out[data.cause2.subject[r]].time, 1, 2, {}};
  }
  return out;
}

double MultinomialLogLik(std::span<const CompetingRisksRecord> records, const TimeGrid& grid,
                         const HazardTable& p1, const HazardTable& p2) {
  const auto n = AtRiskCounts(records, grid);
  CheckTable(p1, n, "p1");
  CheckTable(p2, n, "p2");
  double ll = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (int j = 1; j <= n[i]; ++j) {
      const bool last = j == n[i];
      const int y1 = last && records[i].cause == 1 ? 1 : 0;
      const int y2 = last && records[i].cause == 2 ? 1 : 0;
      const double a = p1[i][j - 1];
      const double b = p2[i][j - 1];
      if (y1) ll += std::log(a);
      if (y2) ll += std::log(b);
      if (!y1 && !y2) ll += std::log1p(-(a + b));
    }
  }
  return ll;
}

double MethodOneLogLik(const CriskM1Data& data, const HazardTable& p1, const HazardTable& p2) {
  const auto& rows = data.any_event;
  CheckTable(p1, rows.n_at_risk, "p1");
  CheckTable(p2, rows.n_at_risk, "p2");
  double ll = 0.0;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const int i = rows.subject[r];
    const int j = rows.grid_index[r];
    ll += BernoulliLog(rows.y[r], p1[i][j - 1] + p2[i][j - 1]);
  }
  const auto& u = data.cause_given_event;
  for (std::size_t r = 0; r < u.rows(); ++r) {
    const int i = u.subject[r];
    const int j = u.grid_index[r];
    const double a = p1[i][j - 1];
    ll += BernoulliLog(u.y[r], a / (a + p2[i][j - 1]));
  }
  return ll;
}

double MethodTwoLogLik(const CriskM2Data& data, const HazardTable& p1, const HazardTable& p2) {
  CheckTable(p1, data.cause1.n_at_risk, "p1");
  CheckTable(p2, data.cause1.n_at_risk, "p2");
  double ll = 0.0;
  for (std::size_t r = 0; r < data.cause1.rows(); ++r) {
    const int i = data.cause1.subject[r];
    const int j = data.cause1.grid_index[r];
    ll += BernoulliLog(data.cause1.y[r], p1[i][j - 1]);
  }
  for (std::size_t r = 0; r < data.cause2.rows(); ++r) {
    const int i = data.cause2.subject[r];
    const int j = data.cause2.grid_index[r];
    ll += BernoulliLog(data.cause2.y[r], p2[i][j - 1] / (1.0 - p1[i][j - 1]));
  }
  return ll;
}

}  // namespace crbart

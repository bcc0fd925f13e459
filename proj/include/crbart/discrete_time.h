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


#ifndef CRBART_DISCRETE_TIME_H_
#define CRBART_DISCRETE_TIME_H_

#include <span>
#include <vector>

#include "crbart/common.h"
#include "crbart/probit.h"

namespace crbart {

// One subject. Censored subjects carry status 0 and cause 0.
struct CompetingRisksRecord {
  double time = 0.0;
  int status = 0;
  int cause = 0;
  std::vector<double> x;
};

// Throws InputError naming the first offending record (1-based).
void ValidateRecords(std::span<const CompetingRisksRecord> records);

// Strictly increasing positive times t_(1) < ... < t_(J); t_(0) = 0 is
// implicit.
struct TimeGrid {
  std::vector<double> times;

  std::size_t size() const { return times.size(); }
  void Validate() const;
  // Number of grid times <= t, i.e. n_i for a subject observed at t.
  int CountAtOrBelow(double t) const;
};

TimeGrid BuildTimeGrid(std::span<const CompetingRisksRecord> records);

struct CoarsenedCohort {
  TimeGrid grid;
  std::vector<CompetingRisksRecord> records;
};

// Maps every time to unit * ceil(t / unit) and builds the grid on the
// distinct coarsened values.
CoarsenedCohort CoarsenGrid(std::span<const CompetingRisksRecord> records, double unit);

// Maps every time to the smallest edge >= t. The grid keeps only edges that
// some record maps to. Times beyond the last edge are an InputError.
CoarsenedCohort CoarsenToEdges(std::span<const CompetingRisksRecord> records,
                               std::span<const double> edges);

// Person-period rows. Column 0 of x is the time covariate, the remaining
// columns are the subject's covariates.
struct LongBinaryData {
  Matrix x;
  std::vector<int> y;
  std::vector<int> subject;     // dense 0-based subject ids in input order
  std::vector<int> grid_index;  // 1-based j
  std::vector<int> n_at_risk;   // n_i per subject

  std::size_t rows() const { return y.size(); }
  BinaryDataset AsDataset() const { return {x, y}; }
};

// y_ij = 0 for j < n_i and y_{i n_i} = delta_i.
LongBinaryData ExpandSurvival(std::span<const CompetingRisksRecord> records, const TimeGrid& grid);

struct CriskM1Data {
  LongBinaryData any_event;          // y_ij. = y_ij1 + y_ij2
  LongBinaryData cause_given_event;  // one row per event, u_i = I(cause 1), time covariate t_i
};

struct CriskM2Data {
  LongBinaryData cause1;  // y_ij1
  LongBinaryData cause2;  // y_ij2, rows with y_ij1 = 1 dropped
};

CriskM1Data ExpandCriskM1(std::span<const CompetingRisksRecord> records, const TimeGrid& grid);
CriskM2Data ExpandCriskM2(std::span<const CompetingRisksRecord> records, const TimeGrid& grid);

// (time, status, cause) recovered from expanded rows; covariates are left
// empty.
std::vector<CompetingRisksRecord> ReconstructM1(const CriskM1Data& data, const TimeGrid& grid);
std::vector<CompetingRisksRecord> ReconstructM2(const CriskM2Data& data, const TimeGrid& grid);

// Discrete hazards per subject and grid step: p[i][j-1] for j = 1..n_i.
using HazardTable = std::vector<std::vector<double>>;

// Multinomial log-likelihood over the y_ijk indicators.
double MultinomialLogLik(std::span<const CompetingRisksRecord> records, const TimeGrid& grid,
                         const HazardTable& p1, const HazardTable& p2);
// Same likelihood through the any-event / cause-given-event factorization,
// evaluated on the expanded rows.
double MethodOneLogLik(const CriskM1Data& data, const HazardTable& p1, const HazardTable& p2);
// Same likelihood through the cause-1 / conditional cause-2 factorization.
double MethodTwoLogLik(const CriskM2Data& data, const HazardTable& p1, const HazardTable& p2);

}  // namespace crbart

#endif  // CRBART_DISCRETE_TIME_H_

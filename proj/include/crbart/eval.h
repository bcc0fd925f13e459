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


#ifndef CRBART_EVAL_H_
#define CRBART_EVAL_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "crbart/crisk.h"
#include "crbart/mcmc.h"
#include "crbart/simgen.h"

namespace crbart {

// Times t_q with 1 - S(t_q) = q, by bisection to 1e-8 or better. S must be
// nonincreasing from S(0) = 1.
std::vector<double> EvalTimes(const std::function<double(double)>& event_free_survival,
                              std::span<const double> quantiles);

struct BiasRmse {
  double bias = 0.0;
  double rmse = 0.0;
};
BiasRmse ComputeBiasRmse(std::span<const double> estimates, double truth);

struct CoverageWidth {
  double coverage = 0.0;
  double width = 0.0;
};
CoverageWidth ComputeCoverageWidth(std::span<const double> lower, std::span<const double> upper,
                                   double truth);

// Lin's concordance correlation coefficient with population moments.
double LinCcc(std::span<const double> pred, std::span<const double> truth);

// Nonparametric CIF estimate evaluated at each distinct observed time.
struct AjEstimate {
  std::vector<double> times;
  std::vector<double> f1;
  std::vector<double> f2;
  std::vector<double> survival;

  // Step-function values at t (0, 0, 1 before the first time).
  CifPair At(double t) const;
};

AjEstimate AalenJohansen(std::span<const CompetingRisksRecord> records);
// Restricted to records whose first covariate equals `group`.
AjEstimate AalenJohansen(std::span<const CompetingRisksRecord> records, int group);

enum class BenchMethod { kM1, kM2, kAJ };
std::string MethodName(BenchMethod m);
BenchMethod ParseBenchMethod(const std::string& name);

struct BenchSpec {
  std::string label;  // scenario label written to every row
  ScenarioConfig scenario;
  std::vector<BenchMethod> methods{BenchMethod::kM1, BenchMethod::kM2, BenchMethod::kAJ};
  int replicates = 10;
  McmcConfig mcmc;
  std::vector<double> quantiles{0.1, 0.3, 0.5, 0.7, 0.9};
  double level = 0.95;
  // Number of quantile bins of observed times used to coarsen the fitting
  // grid; eval times are always grid edges. 0 fits on the raw times.
  int grid_bins = 30;
  std::uint64_t master_seed = 0;
  int threads = 1;

  void Validate() const;
};

struct MetricRow {
  std::string scenario;
  std::string censor;
  int group = 0;
  double quantile = 0.0;
  double eval_time = 0.0;
  std::string method;
  double f1_truth = 0.0;
  double f1_bias = 0.0;
  double f1_rmse = 0.0;
  double f1_coverage = 0.0;  // NaN for methods without intervals
  double f1_width = 0.0;
  double s_truth = 0.0;
  double s_bias = 0.0;
  double s_rmse = 0.0;
  double s_coverage = 0.0;
  double s_width = 0.0;
  int replicates_used = 0;
  int failures = 0;
};

struct MetricTable {
  std::vector<MetricRow> rows;
  std::uint64_t master_seed = 0;
};

// Replicate r uses seed DeriveSeed(master_seed, r) for its cohort and
// derived seeds for each method's fit. Fit failures are counted per method
// and excluded from that method's metrics. Rows are ordered by group,
// quantile, method.
MetricTable RunReplicates(const BenchSpec& spec);

}  // namespace crbart

#endif  // CRBART_EVAL_H_

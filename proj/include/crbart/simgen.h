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


#ifndef CRBART_SIMGEN_H_
#define CRBART_SIMGEN_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crbart/discrete_time.h"
#include "crbart/random.h"

namespace crbart {

enum class ScenarioCase { kCox, kFineGray, kWeibull, kFriedman };

std::string CaseName(ScenarioCase c);
ScenarioCase ParseCase(const std::string& name);

// Cases 1-3 use one binary group covariate x in {0, 1}. Case 1 uses
// lambda01, lambda02, beta1, beta2; Case 2 uses beta1, p0, gamma0; Case 3
// uses beta1, beta2, p0, gamma0; the Friedman scenario uses p0, gamma0 and
// p covariates.
struct ScenarioConfig {
  ScenarioCase kase = ScenarioCase::kCox;
  double lambda01 = 1.0;
  double lambda02 = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double p0 = 0.5;
  double gamma0 = 2.0;
  int n = 500;
  int p = 10;
  std::optional<double> censor_target;  // expected censored fraction
  std::uint64_t seed = 0;

  void Validate() const;
  int NumCovariates() const { return kase == ScenarioCase::kFriedman ? p : 1; }

  bool operator==(const ScenarioConfig&) const = default;
};

// The twelve parameter rows for Cases 1-3, rows 1-4 of each case in turn.
std::vector<ScenarioConfig> ScenarioRows();
// `case_number` in 1..3, `row` in 1..4.
ScenarioConfig ScenarioRow(int case_number, int row);
// Friedman scenario with p0 = 0.2, gamma0 = 2 and 20% censoring.
ScenarioConfig FriedmanScenario(int n, int p);

struct CifPair {
  double f1 = 0.0;
  double f2 = 0.0;
  double Survival() const { return 1.0 - f1 - f2; }
};

CifPair TrueCifCase1(double t, double x, double lambda01, double lambda02, double beta1,
                     double beta2);
// `eta` plays the role of x * beta1.
CifPair TrueCifCase2(double t, double eta, double p0, double gamma0);
CifPair TrueCifCase3(double t, double x, double beta1, double beta2, double p0, double gamma0);

// 0.5 sin(pi x_1 x_{P/2+1}) + x_2^2 + 0.5 x_{P/2+2} + 0.25 x_3^2 - 1.25 with
// 1-based coordinates; P = x.size().
double FriedmanF(std::span<const double> x);

// True CIFs of the scenario at covariates x.
CifPair TrueCif(const ScenarioConfig& cfg, double t, std::span<const double> x);

// Inverse of t -> F_1(t)/F_1(inf) under Case 2.
double InvertCase2Cause1(double v, double eta, double p0, double gamma0);

std::vector<double> DrawCovariates(const ScenarioConfig& cfg, Rng& rng);

struct LatentEvent {
  double time = 0.0;
  int cause = 0;
};

// Uncensored event time and cause for a subject with covariates x.
LatentEvent DrawEvent(const ScenarioConfig& cfg, std::span<const double> x, Rng& rng);

// Rate c of Exponential(c) censoring with P(C < T) = target for
// T ~ Exponential(rate).
double ExponentialCensoringRate(double event_rate, double target);
// Bisection on the sample mean of P(C < T_i | T_i) = 1 - exp(-c T_i).
double CalibrateCensoringRate(std::span<const double> event_times, double target);
// Censoring rate for the scenario's censor_target (0 when absent). Uses the
// closed form when event times are exponential with a common rate and
// 10^5 simulated event times otherwise.
double CalibrateCensoring(const ScenarioConfig& cfg, double target);

struct Cohort {
  std::vector<CompetingRisksRecord> records;
  double censor_rate = 0.0;
};

// cfg.n subjects with censoring at `censor_rate` (0 disables censoring).
Cohort GenerateCohort(const ScenarioConfig& cfg, double censor_rate, Rng& rng);
// Calibrates censoring and draws from Rng(cfg.seed).
Cohort GenerateCohort(const ScenarioConfig& cfg);

}  // namespace crbart

#endif  // CRBART_SIMGEN_H_

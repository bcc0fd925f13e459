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


#ifndef CRBART_CRISK_H_
#define CRBART_CRISK_H_

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "crbart/discrete_time.h"
#include "crbart/numerics.h"
#include "crbart/probit.h"

namespace crbart {

enum class Method { kM1, kM2 };
enum class Functional { kSurvival, kCif1, kCif2 };

// Method 1: `first` models the any-event hazard p_y(t, x) and `second` the
// cause-1 share psi(t, x). Method 2: `first` models p_1(t, x) and `second`
// the conditional cause-2 hazard p_2(t, x). Both sub-fits take covariates
// [t, x].
struct CriskFit {
  Method method = Method::kM1;
  TimeGrid grid;
  ProbitFit first;
  ProbitFit second;

  std::size_t num_draws() const { return first.num_draws(); }
  // Covariates excluding the time column.
  int num_covariates() const { return first.num_vars - 1; }
};

CriskFit FitM1(std::span<const CompetingRisksRecord> records, const TimeGrid& grid,
               const McmcConfig& cfg);
CriskFit FitM2(std::span<const CompetingRisksRecord> records, const TimeGrid& grid,
               const McmcConfig& cfg);
CriskFit FitCrisk(Method method, std::span<const CompetingRisksRecord> records,
                  const TimeGrid& grid, const McmcConfig& cfg);

struct CurveSet {
  std::vector<double> survival;
  std::vector<double> cif1;
  std::vector<double> cif2;
};

// S(t_j) = prod_{l<=j} (1 - p_y); F_1 increments S(t_{l-1}) p_y psi and F_2
// increments S(t_{l-1}) p_y (1 - psi). With `paper_increment` the p_y factor
// is dropped from both increments, which breaks F_1 + F_2 + S = 1.
CurveSet MethodOneCurves(std::span<const double> p_any, std::span<const double> psi,
                         bool paper_increment = false);
// S(t_j) = prod_{l<=j} (1 - p_1)(1 - p_2); F_1 increments S(t_{l-1}) p_1 and
// F_2 increments S(t_{l-1}) (1 - p_1) p_2.
CurveSet MethodTwoCurves(std::span<const double> p1, std::span<const double> p2);

// Curves of one posterior draw at covariates x over the first `upto` grid
// times.
CurveSet DrawCurves(const CriskFit& fit, std::size_t draw, std::span<const double> x,
                    std::size_t upto = std::numeric_limits<std::size_t>::max(),
                    bool paper_increment = false);

// Per-draw step-function values (rows are draws) on the grid.
struct CifCurve {
  std::vector<double> times;
  Matrix values;
};

struct CurveDraws {
  CifCurve survival;
  CifCurve cif1;
  CifCurve cif2;

  const CifCurve& Get(Functional f) const;
};

CurveDraws AllCurves(const CriskFit& fit, std::span<const double> x,
                     std::size_t upto = std::numeric_limits<std::size_t>::max(),
                     bool paper_increment = false);
CifCurve Survival(const CriskFit& fit, std::span<const double> x);
CifCurve Cif(const CriskFit& fit, std::span<const double> x, int cause,
             bool paper_increment = false);

struct PosteriorSummary {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> lower;
  std::vector<double> upper;
  double level = 0.95;
};

PosteriorSummary Summarize(const CifCurve& curve, double level = 0.95);

// Per draw, the smallest grid time with F >= tau, or nullopt when the curve
// never reaches tau.
std::vector<std::optional<double>> ConditionalQuantile(const CifCurve& curve, double tau);

// Covariates of `cohort` rows with columns `subset` replaced by `values`.
Matrix OverrideColumns(const Matrix& cohort, std::span<const int> subset,
                       std::span<const double> values);

// Per draw, the average of the selected functional over the cohort rows with
// the subset columns fixed at `values`.
CifCurve PartialDependence(const CriskFit& fit, std::span<const int> subset,
                           std::span<const double> values, const Matrix& cohort,
                           Functional functional);

// Largest grid index (1-based) with t_j <= t; 0 when t precedes the grid.
std::size_t SnapToGrid(const TimeGrid& grid, double t);

// Posterior draws of PD_F1(t|a) - PD_F1(t|b), t snapped down to the grid.
std::vector<double> PdDifference(const CriskFit& fit, std::span<const int> subset,
                                 std::span<const double> values_a,
                                 std::span<const double> values_b, const Matrix& cohort,
                                 double t);

// For each cohort row, the posterior summary of F_1(t|a, x_iC) - F_1(t|b, x_iC).
std::vector<IntervalSummary> IndividualDifferences(const CriskFit& fit, const Matrix& cohort,
                                                   std::span<const int> subset,
                                                   std::span<const double> values_a,
                                                   std::span<const double> values_b, double t,
                                                   double level = 0.95);

// Per variable (index 0 is the time covariate): mean selection probability
// and fraction of draws whose ensemble uses the variable at least once.
struct VarselSummary {
  std::vector<double> probability;
  std::vector<double> used_fraction;
};

VarselSummary VarselProbabilities(const ProbitFit& fit);

struct CriskVarsel {
  VarselSummary first;
  VarselSummary second;
  VarselSummary pooled;
};

CriskVarsel VarselProbabilities(const CriskFit& fit);

}  // namespace crbart

#endif  // CRBART_CRISK_H_

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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "crbart/crisk.h"
#include "crbart/numerics.h"
#include "crbart/simgen.h"
#include "test_util.h"

namespace crbart {
namespace {

using testing::ToyCohort;

void ExpectVectorNear(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], tol) << k;
}

McmcConfig TinyConfig(std::uint64_t seed) {
  McmcConfig cfg;
  cfg.m = 20;
  cfg.burn_in = 20;
  cfg.thin = 1;
  cfg.n_draws = 50;
  cfg.seed = seed;
  return cfg;
}

// Checks F1 + F2 + S = 1, monotonicity and range for every draw.
void ExpectCoherentCurves(const CurveDraws& c) {
  const Matrix& s = c.survival.values;
  const Matrix& f1 = c.cif1.values;
  const Matrix& f2 = c.cif2.values;
  for (Eigen::Index d = 0; d < s.rows(); ++d) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      ASSERT_NEAR(f1(d, j) + f2(d, j) + s(d, j), 1.0, 1e-12);
      ASSERT_GE(s(d, j), 0.0);
      ASSERT_LE(s(d, j), 1.0);
      ASSERT_GE(f1(d, j), 0.0);
      ASSERT_GE(f2(d, j), 0.0);
      if (j > 0) {
        ASSERT_LE(s(d, j), s(d, j - 1));
        ASSERT_GE(f1(d, j), f1(d, j - 1));
        ASSERT_GE(f2(d, j), f2(d, j - 1));
      }
    }
  }
}

TEST(MethodOneCurves, ProductRule) {
  const std::vector<double> psi{0.3, 0.3};
  ExpectVectorNear(MethodOneCurves(std::vector<double>{0.1, 0.1}, psi).survival, {0.9, 0.81},
                   1e-15);
  ExpectVectorNear(MethodOneCurves(std::vector<double>{0.0, 0.0}, psi).survival, {1.0, 1.0}, 0);
  const std::vector<double> psi3{0.5, 0.5, 0.5};
  ExpectVectorNear(MethodOneCurves(std::vector<double>{0.2, 0.5, 0.1}, psi3).survival,
                   {0.8, 0.4, 0.36}, 1e-15);
}

TEST(MethodOneCurves, HandTelescoping) {
  const auto c = MethodOneCurves(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5});
  ExpectVectorNear(c.cif1, {0.25, 0.375}, 1e-15);
  ExpectVectorNear(c.cif2, {0.25, 0.375}, 1e-15);
  ExpectVectorNear(c.survival, {0.5, 0.25}, 1e-15);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(c.cif1[j] + c.cif2[j] + c.survival[j], 1.0, 1e-15);

  const auto one = MethodOneCurves(std::vector<double>{1.0}, std::vector<double>{1.0});
  EXPECT_EQ(one.cif1[0], 1.0);

  const std::vector<double> py{0.2, 0.3, 0.4};
  const auto all1 = MethodOneCurves(py, std::vector<double>{1.0, 1.0, 1.0});
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(all1.cif1[j], 1.0 - all1.survival[j], 1e-15);
    EXPECT_EQ(all1.cif2[j], 0.0);
  }
}

TEST(MethodOneCurves, DisplayedIncrementDropsTheHazard) {
  const auto c = MethodOneCurves(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5},
                                 true);
  ExpectVectorNear(c.cif1, {0.5, 0.75}, 1e-15);
  EXPECT_GT(c.cif1[1] + c.cif2[1] + c.survival[1], 1.0 + 1e-3);
}

TEST(MethodTwoCurves, HandArithmetic) {
  const auto c = MethodTwoCurves(std::vector<double>{0.1, 0.1}, std::vector<double>{0.2, 0.2});
  ExpectVectorNear(c.survival, {0.72, 0.5184}, 1e-15);
  ExpectVectorNear(c.cif1, {0.1, 0.172}, 1e-15);
  ExpectVectorNear(c.cif2, {0.18, 0.3096}, 1e-15);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(c.cif1[j] + c.cif2[j] + c.survival[j], 1.0, 1e-15);

  const auto half = MethodTwoCurves(std::vector<double>{0.5}, std::vector<double>{0.0});
  EXPECT_EQ(half.cif1[0], 0.5);
  EXPECT_EQ(half.survival[0], 0.5);
}

TEST(MethodTwoCurves, NoCauseTwoReducesToSingleRisk) {
  const std::vector<double> p1{0.1, 0.25, 0.05, 0.6};
  const auto c = MethodTwoCurves(p1, std::vector<double>(4, 0.0));
  double s = 1.0;
  for (int j = 0; j < 4; ++j) {
    s *= 1.0 - p1[j];
    EXPECT_EQ(c.survival[j], s);
    EXPECT_EQ(c.cif2[j], 0.0);
  }
}

TEST(ConditionalQuantile, StepSearch) {
  CifCurve c;
  c.times = {1.0, 2.0, 3.0};
  c.values.resize(1, 3);
  c.values << 0.1, 0.3, 0.6;
  EXPECT_EQ(ConditionalQuantile(c, 0.5)[0], 3.0);
  EXPECT_FALSE(ConditionalQuantile(c, 0.95)[0].has_value());
  EXPECT_EQ(ConditionalQuantile(c, 0.3)[0], 2.0);
  EXPECT_THROW(ConditionalQuantile(c, 1.0), InputError);
}

TEST(Summarize, OrderedBounds) {
  CifCurve c;
  c.times = {1.0, 2.0};
  c.values.resize(4, 2);
  c.values << 0.1, 0.2, 0.3, 0.4, 0.2, 0.6, 0.4, 0.5;
  const auto s = Summarize(c, 0.9);
  for (int j = 0; j < 2; ++j) {
    EXPECT_LE(s.lower[j], s.mean[j]);
    EXPECT_LE(s.mean[j], s.upper[j]);
  }
  EXPECT_DOUBLE_EQ(s.mean[0], 0.25);
}

// Hand-built Method 2 fit on grid (1, 2, 3) with one binary covariate:
// p_1 = Phi(-0.5 - 1{x < 0.5}) and p_2 = Phi(-0.8).
CriskFit HandFit(Method method) {
  CriskFit fit;
  fit.method = method;
  fit.grid.times = {1.0, 2.0, 3.0};
  fit.first.num_vars = 2;
  fit.second.num_vars = 2;
  fit.first.offset = -0.5;
  fit.second.offset = -1.0;
  Tree split;
  split.Grow(Tree::kRoot, {1, -1, 0.5}, -1.0, 0.0);
  for (int d = 0; d < 3; ++d) {
    fit.first.draws.push_back(FrozenEnsemble{{FrozenTree(split), FrozenTree(Tree(0.1 * d))}});
    fit.second.draws.push_back(FrozenEnsemble{{FrozenTree(Tree(0.2))}});
  }
  return fit;
}

double HandF1(double x, int draw, int j) {
  const double p1 = NormalCdf(-0.5 + (x < 0.5 ? -1.0 : 0.0) + 0.1 * draw);
  const double p2 = NormalCdf(-0.8);
  double s = 1.0, f = 0.0;
  for (int l = 0; l < j; ++l) {
    f += s * p1;
    s *= (1.0 - p1) * (1.0 - p2);
  }
  return f;
}

TEST(HandFit, CurvesMatchHandAlgebra) {
  const CriskFit fit = HandFit(Method::kM2);
  const std::vector<double> x{1.0};
  const CifCurve f1 = Cif(fit, x, 1);
  ASSERT_EQ(f1.values.rows(), 3);
  for (int d = 0; d < 3; ++d) {
    for (int j = 1; j <= 3; ++j) EXPECT_NEAR(f1.values(d, j - 1), HandF1(1.0, d, j), 1e-15);
  }
  ExpectCoherentCurves(AllCurves(fit, x));
  ExpectCoherentCurves(AllCurves(HandFit(Method::kM1), x));
}

TEST(PartialDependence, AveragesCurvesOverTheCohort) {
  const CriskFit fit = HandFit(Method::kM2);
  Matrix cohort(2, 1);
  cohort << 0.0, 1.0;
  const std::vector<int> none;
  const std::vector<double> no_values;
  const CifCurve pd = PartialDependence(fit, none, no_values, cohort, Functional::kCif1);
  const CifCurve a = Cif(fit, std::vector<double>{0.0}, 1);
  const CifCurve b = Cif(fit, std::vector<double>{1.0}, 1);
  EXPECT_TRUE(pd.values.isApprox(0.5 * (a.values + b.values), 1e-15));

  const std::vector<int> subset{0};
  const std::vector<double> at{1.0};
  const CifCurve fixed = PartialDependence(fit, subset, at, cohort, Functional::kCif1);
  EXPECT_TRUE((fixed.values.array() == b.values.array()).all());

  Matrix single(1, 1);
  single << 0.0;
  const CifCurve one = PartialDependence(fit, none, no_values, single, Functional::kSurvival);
  EXPECT_TRUE((one.values.array() == Survival(fit, std::vector<double>{0.0}).values.array()).all());
  EXPECT_THROW(PartialDependence(fit, none, no_values, Matrix(0, 1), Functional::kCif1),
               InputError);
}

TEST(PartialDependence, ConstantModelIgnoresTheCohort) {
  CriskFit fit = HandFit(Method::kM1);
  for (auto& e : fit.first.draws) e.trees = {FrozenTree(Tree(0.3))};
  Matrix cohort(3, 1);
  cohort << 0.0, 1.0, 0.2;
  const std::vector<int> none;
  const std::vector<double> no_values;
  const CifCurve pd = PartialDependence(fit, none, no_values, cohort, Functional::kCif2);
  const CifCurve c = Cif(fit, std::vector<double>{0.7}, 2);
  EXPECT_TRUE(pd.values.isApprox(c.values, 1e-15));
}

TEST(PdDifference, HandOracleAndSymmetry) {
  const CriskFit fit = HandFit(Method::kM2);
  Matrix cohort(2, 1);
  cohort << 0.0, 1.0;
  const std::vector<int> subset{0};
  const std::vector<double> a{1.0}, b{0.0};
  const auto diff = PdDifference(fit, subset, a, b, cohort, 2.7);
  ASSERT_EQ(diff.size(), 3u);
  for (int d = 0; d < 3; ++d) EXPECT_NEAR(diff[d], HandF1(1.0, d, 2) - HandF1(0.0, d, 2), 1e-15);
  const auto rev = PdDifference(fit, subset, b, a, cohort, 2.7);
  for (int d = 0; d < 3; ++d) EXPECT_EQ(diff[d], -rev[d]);
  for (double v : PdDifference(fit, subset, a, a, cohort, 2.7)) EXPECT_EQ(v, 0.0);
  for (double v : PdDifference(fit, subset, a, b, cohort, 0.5)) EXPECT_EQ(v, 0.0);
}

TEST(IndividualDifferences, AverageEqualsPdDifference) {
  CriskFit fit = HandFit(Method::kM2);
  // Let the covariate interact with a second one so subjects differ.
  Tree inter;
  inter.Grow(Tree::kRoot, {2, -1, 0.0}, 0.3, -0.2);
  fit.first.num_vars = 3;
  fit.second.num_vars = 3;
  for (auto& e : fit.first.draws) e.trees.push_back(FrozenTree(inter));
  Matrix cohort(3, 2);
  cohort << 0.0, -1.0, 1.0, 1.0, 0.0, 2.0;
  const std::vector<int> subset{0};
  const std::vector<double> a{1.0}, b{0.0};
  const auto ind = IndividualDifferences(fit, cohort, subset, a, b, 3.0);
  const auto pd = PdDifference(fit, subset, a, b, cohort, 3.0);
  double mean_ind = 0.0;
  for (const auto& s : ind) mean_ind += s.mean / 3.0;
  EXPECT_NEAR(mean_ind, testing::Mean(pd), 1e-14);

  const Matrix first_row = cohort.topRows(1);
  const auto one = IndividualDifferences(fit, first_row, subset, a, b, 3.0);
  EXPECT_NEAR(one[0].mean, testing::Mean(PdDifference(fit, subset, a, b, first_row, 3.0)), 1e-15);
}

TEST(SnapToGrid, SnapsDown) {
  TimeGrid g{{1.0, 2.0, 3.0}};
  EXPECT_EQ(SnapToGrid(g, 0.5), 0u);
  EXPECT_EQ(SnapToGrid(g, 2.0), 2u);
  EXPECT_EQ(SnapToGrid(g, 2.9), 2u);
  EXPECT_EQ(SnapToGrid(g, 9.0), 3u);
}

TEST(Varsel, SingleVariableAndRootOnly) {
  ProbitFit fit;
  fit.num_vars = 1;
  fit.split_counts = {{0}, {3}, {1}};
  const auto v = VarselProbabilities(fit);
  EXPECT_EQ(v.probability[0], 1.0);
  EXPECT_DOUBLE_EQ(v.used_fraction[0], 2.0 / 3.0);

  ProbitFit bare;
  bare.num_vars = 3;
  bare.split_counts.assign(4, std::vector<int>(3, 0));
  const auto w = VarselProbabilities(bare);
  for (double u : w.used_fraction) EXPECT_EQ(u, 0.0);
  for (double p : w.probability) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
}

TEST(Varsel, PlantedSignalRanksFirst) {
  Rng rng(1);
  BinaryDataset d;
  d.x.resize(2000, 5);
  d.y.resize(2000);
  for (int i = 0; i < 2000; ++i) {
    for (int j = 0; j < 5; ++j) d.x(i, j) = rng.Uniform();
    d.y[i] = rng.Uniform() < (d.x(i, 0) < 0.5 ? 0.15 : 0.6);
  }
  McmcConfig cfg = TinyConfig(2);
  cfg.burn_in = 100;
  cfg.n_draws = 100;
  const auto v = VarselProbabilities(FitProbit(d, cfg));
  const auto top = std::max_element(v.used_fraction.begin(), v.used_fraction.end());
  EXPECT_EQ(top - v.used_fraction.begin(), 0);
  const auto topp = std::max_element(v.probability.begin(), v.probability.end());
  EXPECT_EQ(topp - v.probability.begin(), 0);
}

TEST(FitCrisk, ToyCohortRunsAndIsDeterministic) {
  const auto cohort = ToyCohort();
  const auto grid = BuildTimeGrid(cohort);
  for (Method m : {Method::kM1, Method::kM2}) {
    const CriskFit a = FitCrisk(m, cohort, grid, TinyConfig(3));
    const CriskFit b = FitCrisk(m, cohort, grid, TinyConfig(3));
    EXPECT_EQ(a.num_draws(), 50u);
    EXPECT_EQ(a.num_covariates(), 1);
    const std::vector<double> x{0.0};
    const CurveDraws ca = AllCurves(a, x);
    ExpectCoherentCurves(ca);
    EXPECT_TRUE((ca.cif1.values.array() == AllCurves(b, x).cif1.values.array()).all());
  }
}

TEST(FitCrisk, MissingEventsNameTheFactor) {
  std::vector<CompetingRisksRecord> no_cause2{
      {1.0, 1, 1, {0.0}}, {2.0, 0, 0, {1.0}}, {3.0, 1, 1, {1.0}}};
  const auto grid = BuildTimeGrid(no_cause2);
  try {
    FitM2(no_cause2, grid, TinyConfig(4));
    FAIL() << "expected an error";
  } catch (const DegenerateOutcomeError& e) {
    EXPECT_NE(std::string(e.what()).find("cause-2"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(FitM1(no_cause2, grid, TinyConfig(4)));

  std::vector<CompetingRisksRecord> censored{{1.0, 0, 0, {0.0}}, {2.0, 0, 0, {1.0}}};
  try {
    FitM1(censored, BuildTimeGrid(censored), TinyConfig(4));
    FAIL() << "expected an error";
  } catch (const DegenerateOutcomeError& e) {
    EXPECT_NE(std::string(e.what()).find("any-event"), std::string::npos) << e.what();
  }
}

TEST(FitCrisk, SingleRiskSurvivalIsTheHazardProduct) {
  std::vector<CompetingRisksRecord> r;
  Rng rng(5);
  for (int i = 0; i < 60; ++i) {
    const double x = static_cast<double>(i % 2);
    const double t = 1.0 + static_cast<double>(rng.UniformIndex(5));
    r.push_back({t, rng.Uniform() < 0.7 ? 1 : 0, 0, {x}});
    if (r.back().status == 1) r.back().cause = 1;
  }
  const auto grid = BuildTimeGrid(r);
  const CriskFit fit = FitM1(r, grid, TinyConfig(6));
  const std::vector<double> x{1.0};
  const CurveDraws c = AllCurves(fit, x);
  for (std::size_t d = 0; d < fit.num_draws(); ++d) {
    double s = 1.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const std::vector<double> v{grid.times[j], 1.0};
      s *= 1.0 - fit.first.Probability(d, v);
      ASSERT_EQ(c.survival.values(d, j), s);
    }
  }
}

TEST(FitCrisk, MethodsAgreeOnSimulatedCohort) {
  ScenarioConfig sc = ScenarioRow(3, 2);
  sc.n = 500;
  sc.censor_target = 0.2;
  sc.seed = 7;
  const Cohort cohort = GenerateCohort(sc);
  std::vector<double> edges;
  for (int k = 1; k <= 30; ++k) edges.push_back(0.05 * k);
  double tmax = 0.0;
  for (const auto& r : cohort.records) tmax = std::max(tmax, r.time);
  edges.push_back(std::max(tmax, 1.5));
  const auto coarse = CoarsenToEdges(cohort.records, edges);
  McmcConfig cfg;
  cfg.m = 50;
  cfg.burn_in = 200;
  cfg.thin = 2;
  cfg.n_draws = 300;
  cfg.seed = 8;
  const CriskFit m1 = FitM1(coarse.records, coarse.grid, cfg);
  const CriskFit m2 = FitM2(coarse.records, coarse.grid, cfg);
  for (double g : {0.0, 1.0}) {
    const std::vector<double> x{g};
    const auto a = Summarize(Cif(m1, x, 1));
    const auto b = Summarize(Cif(m2, x, 1));
    double sup = 0.0;
    for (std::size_t j = 0; j < a.mean.size(); ++j) sup = std::max(sup, std::abs(a.mean[j] - b.mean[j]));
    EXPECT_LT(sup, 0.05) << "group " << g;
    ExpectCoherentCurves(AllCurves(m1, x));
    ExpectCoherentCurves(AllCurves(m2, x));
  }
}

TEST(CriskVarsel, PooledCombinesBothFits) {
  CriskFit fit = HandFit(Method::kM2);
  fit.first.split_counts = {{1, 1}, {0, 2}};
  fit.second.split_counts = {{2, 0}, {0, 0}};
  const auto v = VarselProbabilities(fit);
  EXPECT_DOUBLE_EQ(v.first.probability[1], 0.75);
  EXPECT_DOUBLE_EQ(v.second.used_fraction[0], 0.5);
  EXPECT_DOUBLE_EQ(v.pooled.probability[0] + v.pooled.probability[1], 1.0);
  EXPECT_DOUBLE_EQ(v.pooled.used_fraction[1], 1.0);
}

}  // namespace
}  // namespace crbart

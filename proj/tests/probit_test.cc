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

#include <atomic>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "crbart/continuous.h"
#include "crbart/mcmc.h"
#include "crbart/numerics.h"
#include "crbart/probit.h"
#include "test_util.h"

namespace crbart {
namespace {

using testing::Mean;

McmcConfig SmallConfig(std::uint64_t seed) {
  McmcConfig cfg;
  cfg.m = 50;
  cfg.burn_in = 100;
  cfg.thin = 2;
  cfg.n_draws = 200;
  cfg.seed = seed;
  return cfg;
}

// Mean over draws of p(x) for each row of x.
std::vector<double> PosteriorMeanProb(const ProbitFit& fit, const Matrix& x) {
  const Matrix p = PredictProb(fit, x);
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = p.col(i).mean();
  return out;
}

TEST(McmcConfig, ValidateRejectsBadCounts) {
  McmcConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.thin = 0;
  EXPECT_THROW(cfg.Validate(), InputError);
  cfg = McmcConfig{};
  cfg.burn_in = -1;
  EXPECT_THROW(cfg.Validate(), InputError);
  cfg = McmcConfig{};
  cfg.m = 0;
  EXPECT_THROW(cfg.Validate(), InputError);
  cfg = McmcConfig{};
  cfg.burn_in = 0;
  EXPECT_NO_THROW(cfg.Validate());
}

TEST(McmcConfig, DefaultsAndDartPrior) {
  const McmcConfig cfg;
  EXPECT_EQ(cfg.m, 200);
  EXPECT_EQ(cfg.burn_in, 100);
  EXPECT_EQ(cfg.thin, 10);
  EXPECT_EQ(cfg.n_draws, 2000);
  EXPECT_EQ(cfg.TotalIterations(), 100 + 10 * 2000);
  McmcConfig dart = cfg;
  dart.dart = true;
  const TreePrior p = MakeTreePrior(dart, 7);
  ASSERT_TRUE(p.dart.has_value());
  EXPECT_EQ(p.dart->rho, 7.0);
  EXPECT_EQ(p.dart->theta, 7.0);
  EXPECT_FALSE(MakeTreePrior(cfg, 7).dart.has_value());
}

TEST(RunChains, RunsEveryChainAndRethrows) {
  std::atomic<int> sum{0};
  RunChains(5, 3, [&](int c) { sum += c + 1; });
  EXPECT_EQ(sum.load(), 15);
  EXPECT_THROW(RunChains(4, 2,
                         [](int c) {
                           if (c == 2) throw NumericError("boom");
                         }),
               NumericError);
}

TEST(ProbitOffset, QuantileValues) {
  EXPECT_EQ(ProbitOffset(0.5), 0.0);
  EXPECT_NEAR(ProbitOffset(0.975), 1.959964, 1e-5);
  EXPECT_THROW(ProbitOffset(0.0), DegenerateOutcomeError);
  EXPECT_THROW(ProbitOffset(1.0), DegenerateOutcomeError);
}

TEST(LatentDraw, SignConstraintHolds) {
  Rng rng(1);
  for (int k = 0; k < 100000; ++k) {
    ASSERT_GE(LatentDraw(1, rng.Normal(), rng), 0.0);
    ASSERT_LT(LatentDraw(0, rng.Normal(), rng), 0.0);
  }
}

TEST(LatentDraw, HalfNormalAndFarLimitMeans) {
  Rng rng(2);
  std::vector<double> lo(100000), hi(100000);
  for (auto& v : lo) v = LatentDraw(0, 0.0, rng);
  for (auto& v : hi) v = LatentDraw(1, 10.0, rng);
  EXPECT_NEAR(Mean(lo), -0.7978845608, 0.01);
  EXPECT_NEAR(Mean(hi), 10.0, 0.01);
}

TEST(BinaryDataset, ValidationErrors) {
  BinaryDataset d;
  d.x = Matrix::Zero(3, 1);
  d.y = {0, 1, 1};
  EXPECT_NO_THROW(d.Validate());
  d.y = {0, 0, 0};
  EXPECT_THROW(d.Validate(), DegenerateOutcomeError);
  EXPECT_NO_THROW(d.Validate(false));
  d.y = {0, 2, 1};
  EXPECT_THROW(d.Validate(), InputError);
  d.y = {0, 1};
  EXPECT_THROW(d.Validate(), InputError);
  d.y = {0, 1, 1};
  d.x(1, 0) = std::nan("");
  EXPECT_THROW(d.Validate(), InputError);
}

TEST(FitProbit, DegenerateOutcomeIsRejected) {
  BinaryDataset d;
  d.x = Matrix::Zero(4, 1);
  d.y = {1, 1, 1, 1};
  EXPECT_THROW(FitProbit(d, SmallConfig(1)), DegenerateOutcomeError);
}

TEST(FitProbit, RecoversConstantProbability) {
  Rng rng(3);
  BinaryDataset d;
  d.x.resize(2000, 1);
  d.y.resize(2000);
  for (int i = 0; i < 2000; ++i) {
    d.x(i, 0) = rng.Uniform();
    d.y[i] = rng.Uniform() < 0.3;
  }
  const ProbitFit fit = FitProbit(d, SmallConfig(4));
  EXPECT_EQ(fit.num_draws(), 200u);
  const auto p = PosteriorMeanProb(fit, d.x);
  EXPECT_NEAR(Mean(p), 0.3, 0.05);
}

TEST(FitProbit, TracksPhiLink) {
  Rng rng(5);
  BinaryDataset d;
  d.x.resize(1000, 2);
  d.y.resize(1000);
  for (int i = 0; i < 1000; ++i) {
    d.x(i, 0) = 4.0 * rng.Uniform() - 2.0;
    d.x(i, 1) = rng.Uniform();
    d.y[i] = rng.Uniform() < NormalCdf(d.x(i, 0));
  }
  const ProbitFit fit = FitProbit(d, SmallConfig(6));
  Matrix grid(21, 2);
  for (int g = 0; g < 21; ++g) {
    grid(g, 0) = -2.0 + 0.2 * g;
    grid(g, 1) = 0.5;
  }
  const auto mean = PosteriorMeanProb(fit, grid);
  double sse = 0.0;
  for (int g = 0; g < 21; ++g) sse += std::pow(mean[g] - NormalCdf(grid(g, 0)), 2);
  EXPECT_LT(std::sqrt(sse / 21.0), 0.1);
}

TEST(FitProbit, SeedDeterminesTheFit) {
  Rng rng(7);
  BinaryDataset d;
  d.x.resize(200, 2);
  d.y.resize(200);
  for (int i = 0; i < 200; ++i) {
    d.x(i, 0) = rng.Uniform();
    d.x(i, 1) = rng.Uniform();
    d.y[i] = rng.Uniform() < 0.2 + 0.6 * d.x(i, 0);
  }
  McmcConfig cfg = SmallConfig(8);
  cfg.n_draws = 30;
  cfg.n_chains = 2;
  cfg.threads = 2;
  const Matrix a = PredictProb(FitProbit(d, cfg), d.x);
  const Matrix b = PredictProb(FitProbit(d, cfg), d.x);
  EXPECT_EQ(a.rows(), 60);
  EXPECT_TRUE((a.array() == b.array()).all());
  cfg.seed = 9;
  const Matrix c = PredictProb(FitProbit(d, cfg), d.x);
  EXPECT_FALSE((a.array() == c.array()).all());
}

TEST(FitProbit, PooledChainsMatchOneLongChain) {
  Rng rng(10);
  BinaryDataset d;
  d.x.resize(300, 1);
  d.y.resize(300);
  for (int i = 0; i < 300; ++i) {
    d.x(i, 0) = rng.Uniform();
    d.y[i] = rng.Uniform() < 0.4;
  }
  McmcConfig cfg;
  cfg.m = 20;
  cfg.burn_in = 100;
  cfg.thin = 5;
  cfg.n_draws = 1000;
  cfg.n_chains = 2;
  cfg.seed = 11;
  const ProbitFit two = FitProbit(d, cfg);
  cfg.n_draws = 2000;
  cfg.n_chains = 1;
  cfg.seed = 12;
  const ProbitFit one = FitProbit(d, cfg);
  ASSERT_EQ(two.num_draws(), one.num_draws());
  Matrix x0(1, 1);
  x0 << 0.5;
  const Matrix pa = PredictProb(two, x0);
  const Matrix pb = PredictProb(one, x0);
  const std::vector<double> va(pa.data(), pa.data() + pa.size());
  const std::vector<double> vb(pb.data(), pb.data() + pb.size());
  EXPECT_GT(testing::KsPValue(va, vb), 0.01);
}

TEST(PredictProb, RootOnlyEnsembleGivesOneHalf) {
  ProbitFit fit;
  fit.num_vars = 2;
  fit.draws.resize(3);
  for (auto& e : fit.draws) e.trees.resize(4);
  Matrix x(2, 2);
  x << 1, 2, -3, 4;
  const Matrix p = PredictProb(fit, x);
  EXPECT_TRUE((p.array() == 0.5).all());
  EXPECT_THROW(PredictProb(fit, Matrix::Zero(1, 3)), InputError);
}

TEST(PredictProb, TwoRegionTreeGivesPhiOfLeafSums) {
  ProbitFit fit;
  fit.num_vars = 2;
  fit.offset = 0.25;
  Tree split;
  split.Grow(Tree::kRoot, {0, -1, 4.0}, -1.0, 0.5);
  Tree shift(0.3);
  fit.draws.push_back(FrozenEnsemble{{FrozenTree(split), FrozenTree(shift)}});
  Matrix x(2, 2);
  x << 1.0, 0.0, 5.0, 0.0;
  const Matrix p = PredictProb(fit, x);
  EXPECT_DOUBLE_EQ(p(0, 0), NormalCdf(0.25 - 1.0 + 0.3));
  EXPECT_DOUBLE_EQ(p(0, 1), NormalCdf(0.25 + 0.5 + 0.3));
}

TEST(PredictProb, StaysStrictlyInsideUnitInterval) {
  ProbitFit fit;
  fit.num_vars = 1;
  fit.draws.push_back(FrozenEnsemble{{FrozenTree(Tree(60.0))}});
  fit.draws.push_back(FrozenEnsemble{{FrozenTree(Tree(-60.0))}});
  const Matrix p = PredictProb(fit, Matrix::Zero(1, 1));
  EXPECT_LT(p(0, 0), 1.0);
  EXPECT_GT(p(1, 0), 0.0);
}

TEST(CalibrateLambda, MatchesChiSquaredQuantile) {
  const double lambda = CalibrateLambda(2.0, 3.0);
  // P(sigma^2 < 4) = P(chi2_3 > 3 lambda / 4) = 0.9.
  const boost::math::chi_squared chi(3.0);
  EXPECT_NEAR(boost::math::cdf(boost::math::complement(chi, 3.0 * lambda / 4.0)), 0.9, 1e-12);
  EXPECT_THROW(CalibrateLambda(0.0, 3.0), InputError);
}

TEST(FitContinuous, RecoversStepFunction) {
  Rng rng(13);
  Matrix x(500, 2);
  std::vector<double> y(500);
  for (int i = 0; i < 500; ++i) {
    x(i, 0) = rng.Uniform();
    x(i, 1) = rng.Uniform();
    y[i] = 10.0 + (x(i, 0) < 0.5 ? -2.0 : 2.0) + rng.Normal(0.0, 0.5);
  }
  const ContinuousFit fit = FitContinuous(x, y, SmallConfig(14));
  ASSERT_EQ(fit.draws.size(), 200u);
  const std::vector<double> lo{0.25, 0.5}, hi{0.75, 0.5};
  double mlo = 0.0, mhi = 0.0, msig = 0.0;
  for (std::size_t d = 0; d < fit.draws.size(); ++d) {
    mlo += fit.Predict(d, lo) / 200.0;
    mhi += fit.Predict(d, hi) / 200.0;
    msig += fit.sigma[d] / 200.0;
  }
  EXPECT_NEAR(mlo, 8.0, 0.2);
  EXPECT_NEAR(mhi, 12.0, 0.2);
  EXPECT_NEAR(msig, 0.5, 0.1);
}

TEST(FitContinuous, ConstantOutcomeIsRejected) {
  const Matrix x = Matrix::Zero(3, 1);
  const std::vector<double> y{1.0, 1.0, 1.0};
  EXPECT_THROW(FitContinuous(x, y, SmallConfig(1)), DegenerateOutcomeError);
}

}  // namespace
}  // namespace crbart

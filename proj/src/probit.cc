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


#include "crbart/probit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crbart/numerics.h"
#include "crbart/sampler.h"

namespace crbart {

void BinaryDataset::Validate(bool require_both_classes) const {
  if (x.rows() < 1) throw InputError("binary dataset has no rows");
  if (x.cols() < 1) throw InputError("binary dataset has no covariates");
  if (static_cast<Eigen::Index>(y.size()) != x.rows()) {
    throw InputError("binary dataset has " + std::to_string(y.size()) + " outcomes for " +
                     std::to_string(x.rows()) + " covariate rows");
  }
  if (!x.allFinite()) throw InputError("binary dataset has missing or non-finite covariates");
  std::size_t ones = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0 && y[i] != 1) {
      throw InputError("outcome at row " + std::to_string(i + 1) + " is not 0/1");
    }
    ones += static_cast<std::size_t>(y[i]);
  }
  if (!require_both_classes) return;
  if (ones == 0) throw DegenerateOutcomeError("binary outcome is all 0");
  if (ones == y.size()) throw DegenerateOutcomeError("binary outcome is all 1");
}

double ProbitFit::Probability(std::size_t draw, std::span<const double> x) const {
  // Keep probabilities strictly inside (0, 1) even for extreme latent sums.
  return std::clamp(NormalCdf(Latent(draw, x)), std::numeric_limits<double>::min(),
                    std::nextafter(1.0, 0.0));
}

double ProbitOffset(double ybar) {
  if (!(ybar > 0.0 && ybar < 1.0)) {
    throw DegenerateOutcomeError("probit offset needs a mean outcome strictly inside (0, 1)");
  }
  return NormalQuantile(ybar);
}

double LatentDraw(int y, double mean, Rng& rng) { return TruncatedNormal(mean, y == 1, rng); }

namespace {

struct ChainOutput {
  std::vector<FrozenEnsemble> draws;
  std::vector<std::vector<int>> counts;
  std::vector<std::vector<double>> probs;
};

ChainOutput RunProbitChain(const BinaryDataset& data, const McmcConfig& cfg, double offset,
                           int chain) {
  Rng rng(cfg.seed, static_cast<std::uint64_t>(chain));
  const int p = static_cast<int>(data.x.cols());
  const std::size_t n = data.y.size();
  SumOfTreesChain state(data.x, MakeTreePrior(cfg, p), cfg.m,
                        LeafScale(OutcomeKind::kProbit, cfg.kappa));
  std::vector<double> target(n);
  ChainOutput out;
  out.draws.reserve(static_cast<std::size_t>(cfg.n_draws));
  for (int iter = 0; iter < cfg.TotalIterations(); ++iter) {
    const auto fit = state.fit();
    for (std::size_t i = 0; i < n; ++i) {
      target[i] = LatentDraw(data.y[i], offset + fit[i], rng) - offset;
    }
    state.Sweep(target, 1.0, rng);
    if (cfg.dart && iter >= cfg.DartStart()) state.UpdateDart(rng);
    if (iter >= cfg.burn_in && (iter - cfg.burn_in + 1) % cfg.thin == 0) {
      out.draws.push_back(state.Freeze());
      out.counts.push_back(state.SplitCounts());
      if (cfg.dart) out.probs.push_back(state.SplitProbs());
    }
  }
  return out;
}

}  // namespace

ProbitFit FitProbit(const BinaryDataset& data, const McmcConfig& cfg,
                    bool require_both_classes) {
  cfg.Validate();
  data.Validate(require_both_classes);
  const double n = static_cast<double>(data.y.size());
  double ybar = 0.0;
  for (int v : data.y) ybar += v;
  ybar /= n;
  ybar = std::clamp(ybar, 1.0 / (n + 1.0), n / (n + 1.0));

  ProbitFit fit;
  fit.offset = ProbitOffset(ybar);
  fit.config = cfg;
  fit.num_vars = static_cast<int>(data.x.cols());

  std::vector<ChainOutput> chains(static_cast<std::size_t>(cfg.n_chains));
  RunChains(cfg.n_chains, cfg.threads,
            [&](int c) { chains[c] = RunProbitChain(data, cfg, fit.offset, c); });
  for (auto& c : chains) {
    std::move(c.draws.begin(), c.draws.end(), std::back_inserter(fit.draws));
    std::move(c.counts.begin(), c.counts.end(), std::back_inserter(fit.split_counts));
    std::move(c.probs.begin(), c.probs.end(), std::back_inserter(fit.split_probs));
  }
  return fit;
}

Matrix PredictProb(const ProbitFit& fit, const Matrix& x) {
  if (x.cols() != fit.num_vars) {
    throw InputError("prediction matrix has " + std::to_string(x.cols()) +
                     " columns; the model expects " + std::to_string(fit.num_vars));
  }
  Matrix out(static_cast<Eigen::Index>(fit.num_draws()), x.rows());
  for (std::size_t d = 0; d < fit.num_draws(); ++d) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out(static_cast<Eigen::Index>(d), i) = fit.Probability(d, RowSpan(x, i));
    }
  }
  return out;
}

}  // namespace crbart

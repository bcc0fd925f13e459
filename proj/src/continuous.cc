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


#include "crbart/continuous.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "crbart/random.h"
#include "crbart/sampler.h"

namespace crbart {

double CalibrateLambda(double sigma_hat, double nu, double quantile) {
  if (!(sigma_hat > 0.0) || !(nu > 0.0) || !(quantile > 0.0 && quantile < 1.0)) {
    throw InputError("lambda calibration needs sigma_hat > 0, nu > 0, quantile in (0, 1)");
  }
  const boost::math::chi_squared chi(nu);
  return sigma_hat * sigma_hat * boost::math::quantile(chi, 1.0 - quantile) / nu;
}

namespace {

struct ChainOutput {
  std::vector<FrozenEnsemble> draws;
  std::vector<double> sigma;
};

}  // namespace

ContinuousFit FitContinuous(const Matrix& x, std::span<const double> y, const McmcConfig& cfg) {
  cfg.Validate();
  const std::size_t n = y.size();
  if (n < 2) throw InputError("continuous fit needs at least 2 rows");
  if (static_cast<Eigen::Index>(n) != x.rows()) {
    throw InputError("outcome length " + std::to_string(n) + " does not match " +
                     std::to_string(x.rows()) + " covariate rows");
  }
  if (!x.allFinite() || !std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); })) {
    throw InputError("continuous fit input has missing or non-finite values");
  }
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (!(*hi > *lo)) throw DegenerateOutcomeError("continuous outcome is constant");

  ContinuousFit fit;
  fit.config = cfg;
  fit.num_vars = static_cast<int>(x.cols());
  fit.offset = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  fit.scale = *hi - *lo;
  std::vector<double> target(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    target[i] = (y[i] - fit.offset) / fit.scale;
    ss += target[i] * target[i];
  }
  fit.lambda = CalibrateLambda(std::sqrt(ss / static_cast<double>(n - 1)), cfg.nu);

  TreePrior prior = MakeTreePrior(cfg, fit.num_vars);
  prior.lambda = fit.lambda;
  std::vector<ChainOutput> chains(static_cast<std::size_t>(cfg.n_chains));
  RunChains(cfg.n_chains, cfg.threads, [&](int c) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(c));
    SumOfTreesChain state(x, prior, cfg.m, LeafScale(OutcomeKind::kContinuous, cfg.kappa));
    std::vector<double> resid(n);
    double sigma = std::sqrt(fit.lambda);
    ChainOutput& out = chains[c];
    for (int iter = 0; iter < cfg.TotalIterations(); ++iter) {
      state.Sweep(target, sigma, rng);
      const auto f = state.fit();
      for (std::size_t i = 0; i < n; ++i) resid[i] = target[i] - f[i];
      sigma = SigmaDraw(resid, prior.nu, prior.lambda, OutcomeKind::kContinuous, rng);
      if (cfg.dart && iter >= cfg.DartStart()) state.UpdateDart(rng);
      if (iter >= cfg.burn_in && (iter - cfg.burn_in + 1) % cfg.thin == 0) {
        out.draws.push_back(state.Freeze());
        out.sigma.push_back(sigma * fit.scale);
      }
    }
  });
  for (auto& c : chains) {
    std::move(c.draws.begin(), c.draws.end(), std::back_inserter(fit.draws));
    fit.sigma.insert(fit.sigma.end(), c.sigma.begin(), c.sigma.end());
  }
  return fit;
}

}  // namespace crbart

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


#ifndef CRBART_MCMC_H_
#define CRBART_MCMC_H_

#include <cstdint>
#include <functional>

#include "crbart/sampler.h"

namespace crbart {

struct McmcConfig {
  int m = 200;
  double kappa = 2.0;
  int burn_in = 100;
  int thin = 10;
  // Kept draws per chain; a fit pools n_draws * n_chains ensembles.
  int n_draws = 2000;
  int n_chains = 1;
  std::uint64_t seed = 0;
  int threads = 1;

  double alpha = 0.95;
  double gamma = 2.0;
  double nu = 3.0;  // continuous outcomes only

  bool dart = false;
  double dart_a = 0.5;
  double dart_b = 1.0;
  double dart_rho = 0.0;  // 0 means the number of covariates
  bool dart_theta_random = true;

  void Validate() const;
  int TotalIterations() const { return burn_in + thin * n_draws; }
  // DART updates of s and theta begin halfway through burn-in.
  int DartStart() const { return burn_in / 2; }
};

// Tree prior for `num_vars` covariates; lambda is left at its default and
// filled in by continuous fits.
TreePrior MakeTreePrior(const McmcConfig& cfg, int num_vars);

// Runs task(chain) for chain = 0..n-1 on up to `threads` worker threads.
// Rethrows the first failure after all workers finish.
void RunChains(int n, int threads, const std::function<void(int)>& task);

}  // namespace crbart

#endif  // CRBART_MCMC_H_

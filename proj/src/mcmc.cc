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


#include "crbart/mcmc.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace crbart {

void McmcConfig::Validate() const {
  if (m < 1) throw InputError("m must be >= 1");
  if (!(kappa > 0.0)) throw InputError("kappa must be positive");
  if (burn_in < 0) throw InputError("burn_in must be >= 0");
  if (thin < 1) throw InputError("thin must be >= 1");
  if (n_draws < 1) throw InputError("n_draws must be >= 1");
  if (n_chains < 1) throw InputError("n_chains must be >= 1");
  if (threads < 1) throw InputError("threads must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (!(gamma >= 0.0)) throw InputError("gamma must be >= 0");
  if (!(nu > 0.0)) throw InputError("nu must be positive");
  if (dart && !(dart_a > 0.0 && dart_b > 0.0 && dart_rho >= 0.0)) {
    throw InputError("DART needs a > 0, b > 0 and rho >= 0");
  }
}

TreePrior MakeTreePrior(const McmcConfig& cfg, int num_vars) {
  TreePrior prior;
  prior.alpha = cfg.alpha;
  prior.gamma = cfg.gamma;
  prior.nu = cfg.nu;
  if (cfg.dart) {
    DartSettings d;
    d.rho = cfg.dart_rho > 0.0 ? cfg.dart_rho : static_cast<double>(num_vars);
    d.theta = d.rho;
    d.a = cfg.dart_a;
    d.b = cfg.dart_b;
    d.theta_random = cfg.dart_theta_random;
    prior.dart = d;
  }
  return prior;
}

void RunChains(int n, int threads, const std::function<void(int)>& task) {
  const int workers = std::max(1, std::min(n, threads));
  if (workers == 1) {
    for (int c = 0; c < n; ++c) task(c);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int c = next++; c < n; c = next++) {
        try {
          task(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace crbart

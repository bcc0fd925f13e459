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


#ifndef CRBART_PROBIT_H_
#define CRBART_PROBIT_H_

#include <span>
#include <vector>

#include "crbart/common.h"
#include "crbart/mcmc.h"
#include "crbart/random.h"
#include "crbart/tree.h"

namespace crbart {

struct BinaryDataset {
  Matrix x;
  std::vector<int> y;

  // Throws InputError on shape problems or non-binary outcomes and
  // DegenerateOutcomeError when only one class is present and both are
  // required.
  void Validate(bool require_both_classes = true) const;
};

// P(y = 1 | x) = Phi(offset + f(x)), with f a sum of trees.
struct ProbitFit {
  std::vector<FrozenEnsemble> draws;  // chain-major: chain 0 draws first
  double offset = 0.0;
  McmcConfig config;
  int num_vars = 0;
  std::vector<std::vector<int>> split_counts;   // per kept draw
  std::vector<std::vector<double>> split_probs;  // per kept draw; empty without DART

  std::size_t num_draws() const { return draws.size(); }
  double Latent(std::size_t draw, std::span<const double> x) const {
    return offset + draws[draw].Sum(x);
  }
  double Probability(std::size_t draw, std::span<const double> x) const;
};

// Phi^{-1}(ybar); DegenerateOutcomeError when ybar is 0 or 1.
double ProbitOffset(double ybar);

// z ~ N(mean, 1) truncated to [0, inf) when y = 1 and to (-inf, 0) when y = 0.
double LatentDraw(int y, double mean, Rng& rng);

// With `require_both_classes` false a single-class outcome is fit with the
// mean clamped to [1/(N+1), N/(N+1)].
ProbitFit FitProbit(const BinaryDataset& data, const McmcConfig& cfg,
                    bool require_both_classes = true);

// Rows are posterior draws, columns are rows of `x`.
Matrix PredictProb(const ProbitFit& fit, const Matrix& x);

}  // namespace crbart

#endif  // CRBART_PROBIT_H_

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


#ifndef CRBART_CONTINUOUS_H_
#define CRBART_CONTINUOUS_H_

#include <span>
#include <vector>

#include "crbart/common.h"
#include "crbart/mcmc.h"
#include "crbart/tree.h"

namespace crbart {

// y = offset + scale * f(x) + e, e ~ N(0, sigma^2). Trees are fit to
// (y - mean) / (max - min).
struct ContinuousFit {
  std::vector<FrozenEnsemble> draws;
  std::vector<double> sigma;  // per kept draw, in the units of y
  double offset = 0.0;
  double scale = 1.0;
  double lambda = 1.0;        // variance prior scale on the fitting scale
  McmcConfig config;
  int num_vars = 0;

  double Predict(std::size_t draw, std::span<const double> x) const {
    return offset + scale * draws[draw].Sum(x);
  }
};

// lambda such that P(sigma < sigma_hat) = quantile under the
// nu*lambda/chi^2_nu prior.
double CalibrateLambda(double sigma_hat, double nu, double quantile = 0.9);

ContinuousFit FitContinuous(const Matrix& x, std::span<const double> y, const McmcConfig& cfg);

}  // namespace crbart

#endif  // CRBART_CONTINUOUS_H_

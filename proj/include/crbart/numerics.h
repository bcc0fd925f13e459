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

#ifndef CRBART_NUMERICS_H_
#define CRBART_NUMERICS_H_

#include <span>
#include <vector>

namespace crbart {

// Standard normal CDF and quantile.
double NormalCdf(double x);
double NormalQuantile(double p);

// Equal-tailed sample quantile with linear interpolation between order
// statistics (type 7). `sorted` must be ascending and nonempty.
double SortedQuantile(std::span<const double> sorted, double q);

struct IntervalSummary {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Mean and equal-tailed `level` credible interval of a sample of draws.
IntervalSummary SummarizeDraws(std::span<const double> draws, double level);

double LogSumExp(std::span<const double> values);

}  // namespace crbart

#endif  // CRBART_NUMERICS_H_

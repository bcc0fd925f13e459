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

#ifndef CRBART_RANDOM_H_
#define CRBART_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace crbart {

// Seeded random stream. Copies carry the full engine state, so a copied
// stream replays the same sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);
  // Independent stream for (seed, stream) pairs, e.g. one per chain.
  Rng(std::uint64_t seed, std::uint64_t stream);

  // Uniform on the open interval (0, 1).
  double Uniform();
  double Normal();
  double Normal(double mean, double sd) { return mean + sd * Normal(); }
  double Gamma(double shape);
  double ChiSquared(double df);
  double Exponential(double rate);
  // Index drawn with probability proportional to `weights`.
  std::size_t Discrete(std::span<const double> weights);
  // Index drawn from normalized log-weights without overflow.
  std::size_t DiscreteLog(std::span<const double> log_weights);
  std::size_t UniformIndex(std::size_t n);

  // Log of a Gamma(shape, 1) draw; stays finite for tiny shapes where the
  // draw itself underflows.
  double LogGamma(double shape);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

// Counter-based seed splitting (SplitMix64 finalizer of seed + index).
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index);

// Draw z ~ N(mean, 1) restricted to [0, inf) when `positive`, else (-inf, 0).
double TruncatedNormal(double mean, bool positive, Rng& rng);

// Log of a Dirichlet(shape) draw; entries exponentiate to a probability
// vector.
std::vector<double> LogDirichlet(std::span<const double> shape, Rng& rng);

}  // namespace crbart

#endif  // CRBART_RANDOM_H_

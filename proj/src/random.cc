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

#include "crbart/random.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crbart/common.h"
#include "crbart/numerics.h"

namespace crbart {

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(DeriveSeed(seed, stream)) {}

double Rng::Uniform() {
  // 53 random bits, offset by half a unit so 0 and 1 never occur.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::Normal() { return normal_(engine_); }

double Rng::Gamma(double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

double Rng::ChiSquared(double df) { return 2.0 * Gamma(0.5 * df); }

double Rng::Exponential(double rate) { return -std::log(Uniform()) / rate; }

std::size_t Rng::Discrete(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw NumericError("Discrete: weights sum to zero");
  double u = Uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  // Rounding: fall back to the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

std::size_t Rng::DiscreteLog(std::span<const double> log_weights) {
  const double norm = LogSumExp(log_weights);
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - norm);
  return Discrete(w);
}

std::size_t Rng::UniformIndex(std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(Uniform() * static_cast<double>(n)));
}

double Rng::LogGamma(double shape) {
  if (shape >= 1.0) return std::log(Gamma(shape));
  // G(a) = G(a + 1) * U^(1/a)
  return std::log(Gamma(shape + 1.0)) + std::log(Uniform()) / shape;
}

namespace {

// Robert (1995) exponential rejection sampler for X ~ N(0,1), X >= a, a > 0.
double TailNormal(double a, Rng& rng) {
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a + rng.Exponential(rate);
    const double d = x - rate;
    if (std::log(rng.Uniform()) <= -0.5 * d * d) return x;
  }
}

// X ~ N(0,1) restricted to X >= a.
double LowerTruncatedStandard(double a, Rng& rng) {
  if (a > 5.0) return TailNormal(a, rng);
  // Invert the upper tail: P(X >= x) = Phi(-x) = U * Phi(-a).
  const double upper_mass = NormalCdf(-a);
  const double x = -NormalQuantile(rng.Uniform() * upper_mass);
  return std::max(x, a);
}

}  // namespace

double TruncatedNormal(double mean, bool positive, Rng& rng) {
  if (positive) return mean + LowerTruncatedStandard(-mean, rng);
  // z < 0  <=>  -(z - mean) > mean
  const double z = mean - LowerTruncatedStandard(mean, rng);
  return std::min(z, -std::numeric_limits<double>::min());
}

std::vector<double> LogDirichlet(std::span<const double> shape, Rng& rng) {
  std::vector<double> out(shape.size());
  for (std::size_t j = 0; j < shape.size(); ++j) out[j] = rng.LogGamma(shape[j]);
  const double norm = LogSumExp(out);
  for (double& v : out) v -= norm;
  return out;
}

}  // namespace crbart

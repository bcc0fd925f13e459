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


#include "crbart/simgen.h"

#include <cmath>
#include <numbers>

namespace crbart {

std::string CaseName(ScenarioCase c) {
  switch (c) {
    case ScenarioCase::kCox:
      return "cox";
    case ScenarioCase::kFineGray:
      return "finegray";
    case ScenarioCase::kWeibull:
      return "weibull";
    case ScenarioCase::kFriedman:
      return "friedman";
  }
  return "cox";
}

ScenarioCase ParseCase(const std::string& name) {
  if (name == "cox" || name == "1") return ScenarioCase::kCox;
  if (name == "finegray" || name == "2") return ScenarioCase::kFineGray;
  if (name == "weibull" || name == "3") return ScenarioCase::kWeibull;
  if (name == "friedman") return ScenarioCase::kFriedman;
  throw InputError("unknown scenario case '" + name + "'");
}

void ScenarioConfig::Validate() const {
  if (n < 1) throw InputError("scenario n must be >= 1");
  if (censor_target && !(*censor_target > 0.0 && *censor_target < 1.0)) {
    throw InputError("censor_target must lie in (0, 1)");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(beta1) || !finite(beta2)) throw InputError("scenario betas must be finite");
  switch (kase) {
    case ScenarioCase::kCox:
      if (!(lambda01 > 0.0 && lambda02 > 0.0)) throw InputError("Case 1 needs positive lambdas");
      break;
    case ScenarioCase::kFriedman:
      if (p < 6 || p % 2 != 0) throw InputError("Friedman scenario needs an even p >= 6");
      [[fallthrough]];
    case ScenarioCase::kFineGray:
    case ScenarioCase::kWeibull:
      if (!(p0 > 0.0 && p0 < 1.0)) throw InputError("p0 must lie in (0, 1)");
      if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
      break;
  }
}

std::vector<ScenarioConfig> ScenarioRows() {
  const double l2 = std::log(2.0);
  const double l3 = std::log(3.0);
  std::vector<ScenarioConfig> rows;
  auto cox = [&](double a, double b, double b1, double b2) {
    ScenarioConfig c;
    c.kase = ScenarioCase::kCox;
    c.lambda01 = a;
    c.lambda02 = b;
    c.beta1 = b1;
    c.beta2 = b2;
    rows.push_back(c);
  };
  auto sub = [&](ScenarioCase k, double b1, double b2, double p0, double g0) {
    ScenarioConfig c;
    c.kase = k;
    c.beta1 = b1;
    c.beta2 = b2;
    c.p0 = p0;
    c.gamma0 = g0;
    rows.push_back(c);
  };
  cox(1, 1, 0, 0);
  cox(1, 1, -l2, l2);
  cox(2, 0.5, 0, 0);
  cox(2, 0.5, -l2, l2);
  sub(ScenarioCase::kFineGray, 0, 0, 0.5, 2);
  sub(ScenarioCase::kFineGray, -l2, 0, 0.5, 2);
  sub(ScenarioCase::kFineGray, 0, 0, 0.8, 2.5);
  sub(ScenarioCase::kFineGray, l2, 0, 0.2, 2.5);
  sub(ScenarioCase::kWeibull, 0, 0, 0.5, 2);
  sub(ScenarioCase::kWeibull, -l3, l3, 0.5, 2);
  sub(ScenarioCase::kWeibull, 0, 0, 0.8, 2.5);
  sub(ScenarioCase::kWeibull, -l3, l3, 0.2, 2.5);
  return rows;
}

ScenarioConfig ScenarioRow(int case_number, int row) {
  if (case_number < 1 || case_number > 3 || row < 1 || row > 4) {
    throw InputError("table rows are addressed by case 1-3 and row 1-4");
  }
  return ScenarioRows()[static_cast<std::size_t>(4 * (case_number - 1) + row - 1)];
}

ScenarioConfig FriedmanScenario(int n, int p) {
  ScenarioConfig c;
  c.kase = ScenarioCase::kFriedman;
  c.p0 = 0.2;
  c.gamma0 = 2.0;
  c.n = n;
  c.p = p;
  c.censor_target = 0.2;
  return c;
}

CifPair TrueCifCase1(double t, double x, double lambda01, double lambda02, double beta1,
                     double beta2) {
  const double l1 = lambda01 * std::exp(x * beta1);
  const double l2 = lambda02 * std::exp(x * beta2);
  const double any = -std::expm1(-(l1 + l2) * t);
  return {l1 / (l1 + l2) * any, l2 / (l1 + l2) * any};
}

CifPair TrueCifCase2(double t, double eta, double p0, double gamma0) {
  const double e = std::exp(eta);
  const double g = -std::expm1(-gamma0 * t);
  return {1.0 - std::pow(1.0 - p0 * g, e), std::pow(1.0 - p0, e) * g};
}

CifPair TrueCifCase3(double t, double x, double beta1, double beta2, double p0, double gamma0) {
  const double g1 = -std::expm1(-gamma0 * std::pow(t, std::exp(x * beta1)));
  const double g2 = -std::expm1(-gamma0 * std::pow(t, std::exp(x * beta2)));
  return {p0 * g1, (1.0 - p0) * g2};
}

double FriedmanF(std::span<const double> x) {
  const std::size_t half = x.size() / 2;
  if (x.size() < 6 || x.size() % 2 != 0) {
    throw InputError("Friedman function needs an even number (>= 6) of covariates");
  }
  return 0.5 * std::sin(std::numbers::pi * x[0] * x[half]) + x[1] * x[1] + 0.5 * x[half + 1] +
         0.25 * x[2] * x[2] - 1.25;
}

CifPair TrueCif(const ScenarioConfig& cfg, double t, std::span<const double> x) {
  if (static_cast<int>(x.size()) != cfg.NumCovariates()) {
    throw InputError("covariate vector does not match the scenario");
  }
  switch (cfg.kase) {
    case ScenarioCase::kCox:
      return TrueCifCase1(t, x[0], cfg.lambda01, cfg.lambda02, cfg.beta1, cfg.beta2);
    case ScenarioCase::kFineGray:
      return TrueCifCase2(t, x[0] * cfg.beta1, cfg.p0, cfg.gamma0);
    case ScenarioCase::kWeibull:
      return TrueCifCase3(t, x[0], cfg.beta1, cfg.beta2, cfg.p0, cfg.gamma0);
    case ScenarioCase::kFriedman:
      return TrueCifCase2(t, FriedmanF(x), cfg.p0, cfg.gamma0);
  }
  return {};
}

double InvertCase2Cause1(double v, double eta, double p0, double gamma0) {
  const double limit = 1.0 - std::pow(1.0 - p0, std::exp(eta));
  const double target = v * limit;
  // 1 - e^{-gamma0 t} = (1 - (1 - F)^{e^{-eta}}) / p0
  const double g = -std::expm1(std::exp(-eta) * std::log1p(-target)) / p0;
  return -std::log1p(-g) / gamma0;
}

std::vector<double> DrawCovariates(const ScenarioConfig& cfg, Rng& rng) {
  if (cfg.kase != ScenarioCase::kFriedman) {
    return {static_cast<double>(rng.UniformIndex(2))};
  }
  std::vector<double> x(static_cast<std::size_t>(cfg.p));
  const std::size_t half = x.size() / 2;
  for (std::size_t j = 0; j < half; ++j) x[j] = 2.0 * rng.Uniform() - 1.0;
  for (std::size_t j = half; j < x.size(); ++j) x[j] = rng.UniformIndex(2) == 0 ? -1.0 : 1.0;
  return x;
}

LatentEvent DrawEvent(const ScenarioConfig& cfg, std::span<const double> x, Rng& rng) {
  switch (cfg.kase) {
    case ScenarioCase::kCox: {
      const double l1 = cfg.lambda01 * std::exp(x[0] * cfg.beta1);
      const double l2 = cfg.lambda02 * std::exp(x[0] * cfg.beta2);
      const double t = rng.Exponential(l1 + l2);
      return {t, rng.Uniform() < l1 / (l1 + l2) ? 1 : 2};
    }
    case ScenarioCase::kFineGray:
    case ScenarioCase::kFriedman: {
      const double eta =
          cfg.kase == ScenarioCase::kFriedman ? FriedmanF(x) : x[0] * cfg.beta1;
      const double limit = 1.0 - std::pow(1.0 - cfg.p0, std::exp(eta));
      if (rng.Uniform() < limit) {
        return {InvertCase2Cause1(rng.Uniform(), eta, cfg.p0, cfg.gamma0), 1};
      }
      return {rng.Exponential(cfg.gamma0), 2};
    }
    case ScenarioCase::kWeibull: {
      const int cause = rng.Uniform() < cfg.p0 ? 1 : 2;
      const double beta = cause == 1 ? cfg.beta1 : cfg.beta2;
      const double t = std::pow(-std::log(rng.Uniform()) / cfg.gamma0, std::exp(-x[0] * beta));
      return {t, cause};
    }
  }
  return {};
}

double ExponentialCensoringRate(double event_rate, double target) {
  if (!(target > 0.0 && target < 1.0)) throw InputError("censoring target must lie in (0, 1)");
  if (!(event_rate > 0.0)) throw InputError("event rate must be positive");
  return target * event_rate / (1.0 - target);
}

double CalibrateCensoringRate(std::span<const double> event_times, double target) {
  if (!(target > 0.0 && target < 1.0)) throw InputError("censoring target must lie in (0, 1)");
  if (event_times.empty()) throw InputError("censoring calibration needs event times");
  auto censored = [&](double c) {
    double s = 0.0;
    for (double t : event_times) s += -std::expm1(-c * t);
    return s / static_cast<double>(event_times.size());
  };
  double lo = 0.0, hi = 1.0;
  while (censored(hi) < target) {
    hi *= 2.0;
    if (hi > 1e12) throw NumericError("censoring calibration did not bracket the target");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (censored(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double CalibrateCensoring(const ScenarioConfig& cfg, double target) {
  cfg.Validate();
  if (cfg.kase == ScenarioCase::kCox) {
    const double r0 = cfg.lambda01 + cfg.lambda02;
    const double r1 = cfg.lambda01 * std::exp(cfg.beta1) + cfg.lambda02 * std::exp(cfg.beta2);
    if (std::abs(r0 - r1) <= 1e-15 * r0) return ExponentialCensoringRate(r0, target);
  }
  constexpr int kSamples = 100000;
  Rng rng(cfg.seed, 0xce45u);
  std::vector<double> times(kSamples);
  for (double& t : times) t = DrawEvent(cfg, DrawCovariates(cfg, rng), rng).time;
  return CalibrateCensoringRate(times, target);
}

Cohort GenerateCohort(const ScenarioConfig& cfg, double censor_rate, Rng& rng) {
  cfg.Validate();
  if (!(censor_rate >= 0.0)) throw InputError("censoring rate must be >= 0");
  Cohort out;
  out.censor_rate = censor_rate;
  out.records.reserve(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    CompetingRisksRecord r;
    r.x = DrawCovariates(cfg, rng);
    const LatentEvent e = DrawEvent(cfg, r.x, rng);
    const double c = censor_rate > 0.0 ? rng.Exponential(censor_rate) : INFINITY;
    if (e.time <= c) {
      r.time = e.time;
      r.status = 1;
      r.cause = e.cause;
    } else {
      r.time = c;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

Cohort GenerateCohort(const ScenarioConfig& cfg) {
  const double rate = cfg.censor_target ? CalibrateCensoring(cfg, *cfg.censor_target) : 0.0;
  Rng rng(cfg.seed);
  return GenerateCohort(cfg, rate, rng);
}

}  // namespace crbart

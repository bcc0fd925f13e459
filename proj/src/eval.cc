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


#include "crbart/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crbart/numerics.h"
#include "crbart/random.h"

namespace crbart {

std::vector<double> EvalTimes(const std::function<double(double)>& event_free_survival,
                              std::span<const double> quantiles) {
  std::vector<double> out;
  out.reserve(quantiles.size());
  for (double q : quantiles) {
    if (!(q > 0.0 && q < 1.0)) throw InputError("eval quantiles must lie in (0, 1)");
    double lo = 0.0, hi = 1.0;
    while (1.0 - event_free_survival(hi) < q) {
      hi *= 2.0;
      if (hi > 1e12) throw NumericError("event-free survival never reaches quantile " + std::to_string(q));
    }
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (1.0 - event_free_survival(mid) < q ? lo : hi) = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

BiasRmse ComputeBiasRmse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw InputError("bias/RMSE needs at least one estimate");
  double sum = 0.0, sq = 0.0;
  for (double e : estimates) {
    sum += e - truth;
    sq += (e - truth) * (e - truth);
  }
  const double n = static_cast<double>(estimates.size());
  return {sum / n, std::sqrt(sq / n)};
}

CoverageWidth ComputeCoverageWidth(std::span<const double> lower, std::span<const double> upper,
                                   double truth) {
  if (lower.empty() || lower.size() != upper.size()) {
    throw InputError("coverage needs matching nonempty interval bounds");
  }
  double hits = 0.0, width = 0.0;
  for (std::size_t r = 0; r < lower.size(); ++r) {
    if (!(lower[r] <= upper[r])) {
      throw InputError("interval " + std::to_string(r + 1) + " has lower > upper");
    }
    if (lower[r] <= truth && truth <= upper[r]) hits += 1.0;
    width += upper[r] - lower[r];
  }
  const double n = static_cast<double>(lower.size());
  return {hits / n, width / n};
}

double LinCcc(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size() || pred.size() < 2) {
    throw InputError("concordance needs two equal-length vectors with n >= 2");
  }
  const double n = static_cast<double>(pred.size());
  double mp = 0.0, mt = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    mp += pred[i];
    mt += truth[i];
  }
  mp /= n;
  mt /= n;
  double vp = 0.0, vt = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    vp += (pred[i] - mp) * (pred[i] - mp);
    vt += (truth[i] - mt) * (truth[i] - mt);
    cov += (pred[i] - mp) * (truth[i] - mt);
  }
  vp /= n;
  vt /= n;
  cov /= n;
  const double denom = vp + vt + (mp - mt) * (mp - mt);
  if (!(denom > 0.0)) throw NumericError("concordance is undefined for identical constant inputs");
  return 2.0 * cov / denom;
}

CifPair AjEstimate::At(double t) const {
  const auto j = std::upper_bound(times.begin(), times.end(), t) - times.begin();
  if (j == 0) return {0.0, 0.0};
  return {f1[j - 1], f2[j - 1]};
}

AjEstimate AalenJohansen(std::span<const CompetingRisksRecord> records) {
  if (records.empty()) throw InputError("Aalen-Johansen needs at least one record");
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return records[a].time < records[b].time; });
  AjEstimate out;
  double s = 1.0, f1 = 0.0, f2 = 0.0;
  std::size_t at_risk = records.size();
  for (std::size_t k = 0; k < order.size();) {
    const double t = records[order[k]].time;
    std::size_t d1 = 0, d2 = 0, leaving = 0;
    for (; k < order.size() && records[order[k]].time == t; ++k, ++leaving) {
      const auto& r = records[order[k]];
      if (r.status == 1) (r.cause == 1 ? d1 : d2) += 1;
    }
    const double n = static_cast<double>(at_risk);
    f1 += s * static_cast<double>(d1) / n;
    f2 += s * static_cast<double>(d2) / n;
    s *= static_cast<double>(at_risk - d1 - d2) / n;
    at_risk -= leaving;
    out.times.push_back(t);
    out.f1.push_back(f1);
    out.f2.push_back(f2);
    out.survival.push_back(s);
  }
  return out;
}

AjEstimate AalenJohansen(std::span<const CompetingRisksRecord> records, int group) {
  std::vector<CompetingRisksRecord> subset;
  for (const auto& r : records) {
    if (!r.x.empty() && r.x[0] == group) subset.push_back(r);
  }
  if (subset.empty()) throw InputError("group " + std::to_string(group) + " has no records");
  return AalenJohansen(subset);
}

std::string MethodName(BenchMethod m) {
  switch (m) {
    case BenchMethod::kM1:
      return "m1";
    case BenchMethod::kM2:
      return "m2";
    case BenchMethod::kAJ:
      return "aj";
  }
  return "m1";
}

BenchMethod ParseBenchMethod(const std::string& name) {
  if (name == "m1") return BenchMethod::kM1;
  if (name == "m2") return BenchMethod::kM2;
  if (name == "aj") return BenchMethod::kAJ;
  throw InputError("unknown method '" + name + "' (expected m1, m2 or aj)");
}

void BenchSpec::Validate() const {
  scenario.Validate();
  if (scenario.kase == ScenarioCase::kFriedman) {
    throw InputError("the replicate benchmark covers the two-group cases 1-3");
  }
  if (methods.empty()) throw InputError("bench needs at least one method");
  if (replicates < 1) throw InputError("replicates must be >= 1");
  if (quantiles.empty()) throw InputError("bench needs at least one quantile");
  if (!(level > 0.0 && level < 1.0)) throw InputError("credible level must lie in (0, 1)");
  if (grid_bins < 0) throw InputError("grid_bins must be >= 0");
  if (threads < 1) throw InputError("threads must be >= 1");
  mcmc.Validate();
}

namespace {

constexpr int kGroups = 2;

// Summaries of one replicate for one method: [group][quantile].
struct MethodResult {
  bool ok = false;
  std::vector<std::vector<IntervalSummary>> f1;
  std::vector<std::vector<IntervalSummary>> s;
};

std::vector<double> GridEdges(const std::vector<CompetingRisksRecord>& records, int bins,
                              const std::vector<std::vector<double>>& eval_times) {
  std::vector<double> times;
  for (const auto& r : records) times.push_back(r.time);
  std::sort(times.begin(), times.end());
  std::vector<double> edges;
  for (int k = 1; k < bins; ++k) {
    edges.push_back(SortedQuantile(times, static_cast<double>(k) / bins));
  }
  for (const auto& g : eval_times) edges.insert(edges.end(), g.begin(), g.end());
  edges.push_back(times.back());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::string CensorLabel(const std::optional<double>& target) {
  if (!target) return "none";
  std::ostringstream os;
  os << *target;
  return os.str();
}

}  // namespace

MetricTable RunReplicates(const BenchSpec& spec) {
  spec.Validate();
  ScenarioConfig base = spec.scenario;
  base.seed = spec.master_seed;
  const double rate = base.censor_target ? CalibrateCensoring(base, *base.censor_target) : 0.0;

  std::vector<std::vector<double>> eval_times(kGroups);
  for (int g = 0; g < kGroups; ++g) {
    const std::vector<double> x{static_cast<double>(g)};
    eval_times[g] = EvalTimes([&](double t) { return TrueCif(base, t, x).Survival(); },
                              spec.quantiles);
  }

  const std::size_t n_methods = spec.methods.size();
  const std::size_t n_q = spec.quantiles.size();
  std::vector<std::vector<MethodResult>> results(static_cast<std::size_t>(spec.replicates),
                                                 std::vector<MethodResult>(n_methods));
  RunChains(spec.replicates, spec.threads, [&](int r) {
    const std::uint64_t seed_r = DeriveSeed(spec.master_seed, static_cast<std::uint64_t>(r));
    Rng rng(seed_r);
    const Cohort cohort = GenerateCohort(base, rate, rng);
    CoarsenedCohort fitting;
    if (spec.grid_bins > 0) {
      fitting = CoarsenToEdges(cohort.records, GridEdges(cohort.records, spec.grid_bins, eval_times));
    } else {
      fitting = {BuildTimeGrid(cohort.records), cohort.records};
    }
    for (std::size_t k = 0; k < n_methods; ++k) {
      MethodResult& out = results[r][k];
      out.f1.assign(kGroups, std::vector<IntervalSummary>(n_q));
      out.s.assign(kGroups, std::vector<IntervalSummary>(n_q));
      try {
        if (spec.methods[k] == BenchMethod::kAJ) {
          for (int g = 0; g < kGroups; ++g) {
            const AjEstimate aj = AalenJohansen(cohort.records, g);
            for (std::size_t q = 0; q < n_q; ++q) {
              const CifPair v = aj.At(eval_times[g][q]);
              const double nan = std::numeric_limits<double>::quiet_NaN();
              out.f1[g][q] = {v.f1, nan, nan};
              out.s[g][q] = {v.Survival(), nan, nan};
            }
          }
        } else {
          McmcConfig cfg = spec.mcmc;
          cfg.seed = DeriveSeed(seed_r, k + 1);
          cfg.threads = 1;
          const Method method = spec.methods[k] == BenchMethod::kM1 ? Method::kM1 : Method::kM2;
          const CriskFit fit = FitCrisk(method, fitting.records, fitting.grid, cfg);
          for (int g = 0; g < kGroups; ++g) {
            std::size_t upto = 0;
            for (double t : eval_times[g]) upto = std::max(upto, SnapToGrid(fit.grid, t));
            const std::vector<double> x{static_cast<double>(g)};
            const CurveDraws curves = AllCurves(fit, x, upto);
            std::vector<double> f1(fit.num_draws()), s(fit.num_draws());
            for (std::size_t q = 0; q < n_q; ++q) {
              const std::size_t j = SnapToGrid(fit.grid, eval_times[g][q]);
              for (std::size_t d = 0; d < f1.size(); ++d) {
                const auto row = static_cast<Eigen::Index>(d);
                f1[d] = j == 0 ? 0.0 : curves.cif1.values(row, static_cast<Eigen::Index>(j - 1));
                s[d] = j == 0 ? 1.0 : curves.survival.values(row, static_cast<Eigen::Index>(j - 1));
              }
              out.f1[g][q] = SummarizeDraws(f1, spec.level);
              out.s[g][q] = SummarizeDraws(s, spec.level);
            }
          }
        }
        out.ok = true;
      } catch (const Error&) {
        out.ok = false;
      }
    }
  });

  MetricTable table;
  table.master_seed = spec.master_seed;
  const std::string label = spec.label.empty() ? CaseName(base.kase) : spec.label;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int g = 0; g < kGroups; ++g) {
    const std::vector<double> x{static_cast<double>(g)};
    for (std::size_t q = 0; q < n_q; ++q) {
      const double t = eval_times[g][q];
      const CifPair truth = TrueCif(base, t, x);
      for (std::size_t k = 0; k < n_methods; ++k) {
        MetricRow row;
        row.scenario = label;
        row.censor = CensorLabel(base.censor_target);
        row.group = g;
        row.quantile = spec.quantiles[q];
        row.eval_time = t;
        row.method = MethodName(spec.methods[k]);
        row.f1_truth = truth.f1;
        row.s_truth = truth.Survival();
        std::vector<double> f1m, f1l, f1u, sm, sl, su;
        for (const auto& rep : results) {
          if (!rep[k].ok) {
            ++row.failures;
            continue;
          }
          f1m.push_back(rep[k].f1[g][q].mean);
          f1l.push_back(rep[k].f1[g][q].lower);
          f1u.push_back(rep[k].f1[g][q].upper);
          sm.push_back(rep[k].s[g][q].mean);
          sl.push_back(rep[k].s[g][q].lower);
          su.push_back(rep[k].s[g][q].upper);
        }
        row.replicates_used = static_cast<int>(f1m.size());
        row.f1_bias = row.f1_rmse = row.f1_coverage = row.f1_width = nan;
        row.s_bias = row.s_rmse = row.s_coverage = row.s_width = nan;
        if (!f1m.empty()) {
          const BiasRmse bf = ComputeBiasRmse(f1m, truth.f1);
          const BiasRmse bs = ComputeBiasRmse(sm, truth.Survival());
          row.f1_bias = bf.bias;
          row.f1_rmse = bf.rmse;
          row.s_bias = bs.bias;
          row.s_rmse = bs.rmse;
          if (spec.methods[k] != BenchMethod::kAJ) {
            const CoverageWidth cf = ComputeCoverageWidth(f1l, f1u, truth.f1);
            const CoverageWidth cs = ComputeCoverageWidth(sl, su, truth.Survival());
            row.f1_coverage = cf.coverage;
            row.f1_width = cf.width;
            row.s_coverage = cs.coverage;
            row.s_width = cs.width;
          }
        }
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

}  // namespace crbart

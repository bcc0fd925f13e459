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


#include "crbart/crisk.h"

#include <algorithm>
#include <string>

#include "crbart/random.h"

namespace crbart {

namespace {

ProbitFit FitFactor(const LongBinaryData& data, const McmcConfig& cfg, const char* name,
                    bool require_events) {
  if (data.rows() == 0) {
    throw DegenerateOutcomeError(std::string(name) + " factor has no rows to fit");
  }
  if (require_events && std::none_of(data.y.begin(), data.y.end(), [](int v) { return v == 1; })) {
    throw DegenerateOutcomeError(std::string(name) + " factor has no events");
  }
  try {
    return FitProbit(data.AsDataset(), cfg, false);
  } catch (const DegenerateOutcomeError& e) {
    throw DegenerateOutcomeError(std::string(name) + " factor: " + e.what());
  }
}

McmcConfig SecondConfig(const McmcConfig& cfg) {
  McmcConfig out = cfg;
  out.seed = DeriveSeed(cfg.seed, 0x5ec0dULL);
  return out;
}

std::vector<double> GridCovariates(const CriskFit& fit, std::span<const double> x) {
  if (static_cast<int>(x.size()) != fit.num_covariates()) {
    throw InputError("covariate vector has " + std::to_string(x.size()) +
                     " entries; the model expects " + std::to_string(fit.num_covariates()));
  }
  std::vector<double> v(x.size() + 1);
  std::copy(x.begin(), x.end(), v.begin() + 1);
  return v;
}

void CheckSubset(const CriskFit& fit, std::span<const int> subset, std::span<const double> a) {
  if (subset.size() != a.size()) throw InputError("subset and values differ in length");
  for (int s : subset) {
    if (s < 0 || s >= fit.num_covariates()) {
      throw InputError("subset index " + std::to_string(s) + " is out of range");
    }
  }
}

std::vector<double> SelectionShare(std::span<const int> counts) {
  std::vector<double> out(counts.size());
  double total = 0.0;
  for (int c : counts) total += c;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    out[j] = total > 0.0 ? counts[j] / total : 1.0 / static_cast<double>(counts.size());
  }
  return out;
}

}  // namespace

CriskFit FitM1(std::span<const CompetingRisksRecord> records, const TimeGrid& grid,
               const McmcConfig& cfg) {
  cfg.Validate();
  const CriskM1Data data = ExpandCriskM1(records, grid);
  CriskFit fit;
  fit.method = Method::kM1;
  fit.grid = grid;
  fit.first = FitFactor(data.any_event, cfg, "any-event hazard (y)", true);
  fit.second = FitFactor(data.cause_given_event, SecondConfig(cfg), "cause-1-given-event (u)",
                         false);
  return fit;
}

CriskFit FitM2(std::span<const CompetingRisksRecord> records, const TimeGrid& grid,
               const McmcConfig& cfg) {
  cfg.Validate();
  const CriskM2Data data = ExpandCriskM2(records, grid);
  CriskFit fit;
  fit.method = Method::kM2;
  fit.grid = grid;
  fit.first = FitFactor(data.cause1, cfg, "cause-1 hazard", true);
  fit.second = FitFactor(data.cause2, SecondConfig(cfg), "conditional cause-2 hazard", true);
  return fit;
}

CriskFit FitCrisk(Method method, std::span<const CompetingRisksRecord> records,
                  const TimeGrid& grid, const McmcConfig& cfg) {
  return method == Method::kM1 ? FitM1(records, grid, cfg) : FitM2(records, grid, cfg);
}

CurveSet MethodOneCurves(std::span<const double> p_any, std::span<const double> psi,
                         bool paper_increment) {
  if (p_any.size() != psi.size()) throw InputError("hazard vectors differ in length");
  CurveSet out;
  const std::size_t j_max = p_any.size();
  out.survival.resize(j_max);
  out.cif1.resize(j_max);
  out.cif2.resize(j_max);
  double s_prev = 1.0, f1 = 0.0, f2 = 0.0;
  for (std::size_t j = 0; j < j_max; ++j) {
    const double event = paper_increment ? s_prev : s_prev * p_any[j];
    f1 += event * psi[j];
    f2 += event * (1.0 - psi[j]);
    s_prev *= 1.0 - p_any[j];
    out.survival[j] = s_prev;
    out.cif1[j] = f1;
    out.cif2[j] = f2;
  }
  return out;
}

CurveSet MethodTwoCurves(std::span<const double> p1, std::span<const double> p2) {
  if (p1.size() != p2.size()) throw InputError("hazard vectors differ in length");
  CurveSet out;
  const std::size_t j_max = p1.size();
  out.survival.resize(j_max);
  out.cif1.resize(j_max);
  out.cif2.resize(j_max);
  double s_prev = 1.0, f1 = 0.0, f2 = 0.0;
  for (std::size_t j = 0; j < j_max; ++j) {
    f1 += s_prev * p1[j];
    f2 += s_prev * (1.0 - p1[j]) * p2[j];
    s_prev *= (1.0 - p1[j]) * (1.0 - p2[j]);
    out.survival[j] = s_prev;
    out.cif1[j] = f1;
    out.cif2[j] = f2;
  }
  return out;
}

CurveSet DrawCurves(const CriskFit& fit, std::size_t draw, std::span<const double> x,
                    std::size_t upto, bool paper_increment) {
  std::vector<double> v = GridCovariates(fit, x);
  const std::size_t j_max = std::min(upto, fit.grid.size());
  std::vector<double> a(j_max), b(j_max);
  for (std::size_t j = 0; j < j_max; ++j) {
    v[0] = fit.grid.times[j];
    a[j] = fit.first.Probability(draw, v);
    b[j] = fit.second.Probability(draw, v);
  }
  return fit.method == Method::kM1 ? MethodOneCurves(a, b, paper_increment)
                                   : MethodTwoCurves(a, b);
}

const CifCurve& CurveDraws::Get(Functional f) const {
  switch (f) {
    case Functional::kSurvival:
      return survival;
    case Functional::kCif1:
      return cif1;
    case Functional::kCif2:
      return cif2;
  }
  return survival;
}

CurveDraws AllCurves(const CriskFit& fit, std::span<const double> x, std::size_t upto,
                     bool paper_increment) {
  if (fit.first.num_draws() != fit.second.num_draws()) {
    throw ContractViolation("sub-fits hold different numbers of draws");
  }
  const std::size_t j_max = std::min(upto, fit.grid.size());
  const auto d_max = static_cast<Eigen::Index>(fit.num_draws());
  const auto cols = static_cast<Eigen::Index>(j_max);
  std::vector<double> times(fit.grid.times.begin(), fit.grid.times.begin() + cols);
  CurveDraws out{{times, Matrix(d_max, cols)}, {times, Matrix(d_max, cols)},
                 {times, Matrix(d_max, cols)}};
  for (Eigen::Index d = 0; d < d_max; ++d) {
    const CurveSet c = DrawCurves(fit, static_cast<std::size_t>(d), x, j_max, paper_increment);
    for (Eigen::Index j = 0; j < cols; ++j) {
      out.survival.values(d, j) = c.survival[j];
      out.cif1.values(d, j) = c.cif1[j];
      out.cif2.values(d, j) = c.cif2[j];
    }
  }
  return out;
}

CifCurve Survival(const CriskFit& fit, std::span<const double> x) {
  return AllCurves(fit, x).survival;
}

CifCurve Cif(const CriskFit& fit, std::span<const double> x, int cause, bool paper_increment) {
  if (cause != 1 && cause != 2) throw InputError("cause must be 1 or 2");
  auto all = AllCurves(fit, x, std::numeric_limits<std::size_t>::max(), paper_increment);
  return cause == 1 ? std::move(all.cif1) : std::move(all.cif2);
}

PosteriorSummary Summarize(const CifCurve& curve, double level) {
  PosteriorSummary out;
  out.times = curve.times;
  out.level = level;
  std::vector<double> column(static_cast<std::size_t>(curve.values.rows()));
  for (Eigen::Index j = 0; j < curve.values.cols(); ++j) {
    for (Eigen::Index d = 0; d < curve.values.rows(); ++d) column[d] = curve.values(d, j);
    const IntervalSummary s = SummarizeDraws(column, level);
    out.mean.push_back(s.mean);
    out.lower.push_back(s.lower);
    out.upper.push_back(s.upper);
  }
  return out;
}

std::vector<std::optional<double>> ConditionalQuantile(const CifCurve& curve, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("quantile level must lie in (0, 1)");
  std::vector<std::optional<double>> out(static_cast<std::size_t>(curve.values.rows()));
  for (Eigen::Index d = 0; d < curve.values.rows(); ++d) {
    for (Eigen::Index j = 0; j < curve.values.cols(); ++j) {
      if (curve.values(d, j) >= tau) {
        out[d] = curve.times[j];
        break;
      }
    }
  }
  return out;
}

Matrix OverrideColumns(const Matrix& cohort, std::span<const int> subset,
                       std::span<const double> values) {
  Matrix out = cohort;
  for (std::size_t k = 0; k < subset.size(); ++k) out.col(subset[k]).setConstant(values[k]);
  return out;
}

CifCurve PartialDependence(const CriskFit& fit, std::span<const int> subset,
                           std::span<const double> values, const Matrix& cohort,
                           Functional functional) {
  if (cohort.rows() == 0) throw InputError("partial dependence needs a nonempty cohort");
  CheckSubset(fit, subset, values);
  const Matrix rows = OverrideColumns(cohort, subset, values);
  CifCurve out;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    CifCurve c = AllCurves(fit, RowSpan(rows, i)).Get(functional);
    if (i == 0) {
      out = std::move(c);
    } else {
      out.values += c.values;
    }
  }
  out.values /= static_cast<double>(rows.rows());
  return out;
}

std::size_t SnapToGrid(const TimeGrid& grid, double t) {
  return static_cast<std::size_t>(grid.CountAtOrBelow(t));
}

std::vector<double> PdDifference(const CriskFit& fit, std::span<const int> subset,
                                 std::span<const double> values_a,
                                 std::span<const double> values_b, const Matrix& cohort,
                                 double t) {
  if (cohort.rows() == 0) throw InputError("partial dependence needs a nonempty cohort");
  CheckSubset(fit, subset, values_a);
  CheckSubset(fit, subset, values_b);
  const std::size_t j = SnapToGrid(fit.grid, t);
  std::vector<double> out(fit.num_draws(), 0.0);
  if (j == 0) return out;
  const Matrix rows_a = OverrideColumns(cohort, subset, values_a);
  const Matrix rows_b = OverrideColumns(cohort, subset, values_b);
  for (std::size_t d = 0; d < out.size(); ++d) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < cohort.rows(); ++i) {
      sum += DrawCurves(fit, d, RowSpan(rows_a, i), j).cif1[j - 1] -
             DrawCurves(fit, d, RowSpan(rows_b, i), j).cif1[j - 1];
    }
    out[d] = sum / static_cast<double>(cohort.rows());
  }
  return out;
}

std::vector<IntervalSummary> IndividualDifferences(const CriskFit& fit, const Matrix& cohort,
                                                   std::span<const int> subset,
                                                   std::span<const double> values_a,
                                                   std::span<const double> values_b, double t,
                                                   double level) {
  CheckSubset(fit, subset, values_a);
  CheckSubset(fit, subset, values_b);
  const std::size_t j = SnapToGrid(fit.grid, t);
  const Matrix rows_a = OverrideColumns(cohort, subset, values_a);
  const Matrix rows_b = OverrideColumns(cohort, subset, values_b);
  std::vector<IntervalSummary> out;
  out.reserve(static_cast<std::size_t>(cohort.rows()));
  std::vector<double> diff(fit.num_draws(), 0.0);
  for (Eigen::Index i = 0; i < cohort.rows(); ++i) {
    if (j > 0) {
      for (std::size_t d = 0; d < diff.size(); ++d) {
        diff[d] = DrawCurves(fit, d, RowSpan(rows_a, i), j).cif1[j - 1] -
                  DrawCurves(fit, d, RowSpan(rows_b, i), j).cif1[j - 1];
      }
    }
    out.push_back(SummarizeDraws(diff, level));
  }
  return out;
}

VarselSummary VarselProbabilities(const ProbitFit& fit) {
  const auto p = static_cast<std::size_t>(fit.num_vars);
  VarselSummary out{std::vector<double>(p, 0.0), std::vector<double>(p, 0.0)};
  const std::size_t draws = fit.split_counts.size();
  if (draws == 0) return out;
  for (std::size_t d = 0; d < draws; ++d) {
    const auto& counts = fit.split_counts[d];
    const std::vector<double> share =
        fit.split_probs.empty() ? SelectionShare(counts) : fit.split_probs[d];
    for (std::size_t v = 0; v < p; ++v) {
      out.probability[v] += share[v];
      if (counts[v] > 0) out.used_fraction[v] += 1.0;
    }
  }
  for (std::size_t v = 0; v < p; ++v) {
    out.probability[v] /= static_cast<double>(draws);
    out.used_fraction[v] /= static_cast<double>(draws);
  }
  return out;
}

CriskVarsel VarselProbabilities(const CriskFit& fit) {
  CriskVarsel out{VarselProbabilities(fit.first), VarselProbabilities(fit.second), {}};
  const auto p = static_cast<std::size_t>(fit.first.num_vars);
  const std::size_t draws = std::min(fit.first.split_counts.size(), fit.second.split_counts.size());
  out.pooled = {std::vector<double>(p, 0.0), std::vector<double>(p, 0.0)};
  if (draws == 0) return out;
  const bool dart = !fit.first.split_probs.empty() && !fit.second.split_probs.empty();
  std::vector<int> counts(p);
  for (std::size_t d = 0; d < draws; ++d) {
    for (std::size_t v = 0; v < p; ++v) {
      counts[v] = fit.first.split_counts[d][v] + fit.second.split_counts[d][v];
    }
    std::vector<double> share(p);
    if (dart) {
      for (std::size_t v = 0; v < p; ++v) {
        share[v] = 0.5 * (fit.first.split_probs[d][v] + fit.second.split_probs[d][v]);
      }
    } else {
      share = SelectionShare(counts);
    }
    for (std::size_t v = 0; v < p; ++v) {
      out.pooled.probability[v] += share[v];
      if (counts[v] > 0) out.pooled.used_fraction[v] += 1.0;
    }
  }
  for (std::size_t v = 0; v < p; ++v) {
    out.pooled.probability[v] /= static_cast<double>(draws);
    out.pooled.used_fraction[v] /= static_cast<double>(draws);
  }
  return out;
}

}  // namespace crbart

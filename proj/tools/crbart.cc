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


// Command-line front end: fit, predict, pd, simulate, bench, varsel.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crbart/crisk.h"
#include "crbart/eval.h"
#include "crbart/io.h"
#include "crbart/numerics.h"
#include "crbart/simgen.h"

namespace {

using crbart::ConfigTree;
using crbart::FormatNumber;
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string config_path;
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed")->envname("CRBART_SEED");
  cmd->add_option("--threads", c.threads, "Worker threads for chains or replicates")
      ->envname("CRBART_THREADS");
  cmd->add_option("--config", c.config_path, "key=value config file with [sections]");
}

ConfigTree LoadConfig(const Common& c, const std::map<std::string, std::set<std::string>>& allowed) {
  if (c.config_path.empty()) return {};
  ConfigTree tree = crbart::ReadConfigFile(c.config_path);
  crbart::RejectUnknownKeys(tree, allowed);
  return tree;
}

crbart::McmcConfig McmcFrom(const ConfigTree& tree, const Common& c) {
  crbart::McmcConfig cfg = crbart::ReadMcmcSection(tree, "mcmc");
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  cfg.Validate();
  return cfg;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw crbart::InputError("cannot write '" + path + "'");
  return out;
}

void CloseOutput(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void Summary(json j) {
  j["status"] = "ok";
  std::cout << j.dump() << std::endl;
}

crbart::Method ParseMethod(const std::string& name) {
  if (name == "m1") return crbart::Method::kM1;
  if (name == "m2") return crbart::Method::kM2;
  throw crbart::InputError("unknown method '" + name + "' (expected m1 or m2)");
}

std::vector<double> SplitNumbers(const std::string& text, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(crbart::ParseNumber(cell, where));
  return out;
}

// ---- fit ----

struct FitArgs {
  Common common;
  std::string data, out, method;
  std::optional<double> coarsen;
};

int RunFit(const FitArgs& a) {
  const ConfigTree tree =
      LoadConfig(a.common, {{"mcmc", crbart::McmcKeys()}, {"fit", {"method", "coarsen"}}});
  const crbart::McmcConfig cfg = McmcFrom(tree, a.common);
  std::string method = a.method;
  if (method.empty()) method = tree.get<std::string>("fit.method", "m1");
  double unit = a.coarsen.value_or(0.0);
  if (!a.coarsen) {
    if (const auto v = tree.get_optional<std::string>("fit.coarsen")) {
      unit = crbart::ParseNumber(*v, "config [fit] coarsen");
    }
  }
  const crbart::CohortTable cohort = crbart::ReadCohortCsv(a.data);
  crbart::CoarsenedCohort data;
  if (unit > 0.0) {
    data = crbart::CoarsenGrid(cohort.records, unit);
  } else if (unit == 0.0) {
    data = {crbart::BuildTimeGrid(cohort.records), cohort.records};
  } else {
    throw crbart::InputError("coarsen unit must be >= 0");
  }
  crbart::ModelArtifact model;
  model.fit = crbart::FitCrisk(ParseMethod(method), data.records, data.grid, cfg);
  model.covariate_names = cohort.covariate_names;
  model.data_checksum = crbart::CohortChecksum(cohort);
  model.config = cfg;
  crbart::SaveModel(model, a.out);
  Summary({{"command", "fit"},
           {"method", method},
           {"output", a.out},
           {"records", cohort.records.size()},
           {"grid_points", data.grid.size()},
           {"draws", model.fit.num_draws()},
           {"seed", cfg.seed},
           {"data_checksum", model.data_checksum}});
  return 0;
}

// ---- predict ----

struct PredictArgs {
  std::string model, data, out;
  double level = 0.95;
};

int RunPredict(const PredictArgs& a) {
  const crbart::ModelArtifact model = crbart::LoadModel(a.model);
  const crbart::Matrix x = crbart::ReadCovariates(crbart::ReadCsvFile(a.data), model.covariate_names);
  auto out = OpenOutput(a.out);
  out << "subject,time,s_mean,s_lower,s_upper,f1_mean,f1_lower,f1_upper,f2_mean,f2_lower,f2_upper\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const crbart::CurveDraws c = crbart::AllCurves(model.fit, crbart::RowSpan(x, i));
    const auto s = crbart::Summarize(c.survival, a.level);
    const auto f1 = crbart::Summarize(c.cif1, a.level);
    const auto f2 = crbart::Summarize(c.cif2, a.level);
    for (std::size_t j = 0; j < s.times.size(); ++j) {
      out << i + 1 << ',' << FormatNumber(s.times[j]);
      for (const auto* p : {&s, &f1, &f2}) {
        out << ',' << FormatNumber(p->mean[j]) << ',' << FormatNumber(p->lower[j]) << ','
            << FormatNumber(p->upper[j]);
      }
      out << '\n';
    }
  }
  CloseOutput(out, a.out);
  Summary({{"command", "predict"}, {"output", a.out}, {"subjects", x.rows()},
           {"grid_points", model.fit.grid.size()}, {"draws", model.fit.num_draws()}});
  return 0;
}

// ---- pd ----

struct PdArgs {
  std::string model, data, out, individual, functional = "f1";
  std::vector<std::string> vars;
  std::vector<std::string> at;
  std::optional<double> time;
  double level = 0.95;
};

int RunPd(const PdArgs& a) {
  const crbart::ModelArtifact model = crbart::LoadModel(a.model);
  const crbart::Matrix cohort =
      crbart::ReadCovariates(crbart::ReadCsvFile(a.data), model.covariate_names);
  std::vector<int> subset;
  for (const auto& v : a.vars) {
    int idx = -1;
    for (std::size_t k = 0; k < model.covariate_names.size(); ++k) {
      if (model.covariate_names[k] == v) idx = static_cast<int>(k);
    }
    if (idx < 0) throw crbart::InputError("unknown covariate '" + v + "'");
    subset.push_back(idx);
  }
  std::vector<std::vector<double>> settings;
  for (const auto& s : a.at) {
    settings.push_back(SplitNumbers(s, "--at"));
    if (settings.back().size() != subset.size()) {
      throw crbart::InputError("each --at needs one value per --var");
    }
  }
  crbart::Functional functional;
  if (a.functional == "s") {
    functional = crbart::Functional::kSurvival;
  } else if (a.functional == "f1") {
    functional = crbart::Functional::kCif1;
  } else if (a.functional == "f2") {
    functional = crbart::Functional::kCif2;
  } else {
    throw crbart::InputError("--functional must be s, f1 or f2");
  }

  auto out = OpenOutput(a.out);
  out << "kind,setting,time,mean,lower,upper\n";
  for (std::size_t k = 0; k < settings.size(); ++k) {
    const auto curve = crbart::PartialDependence(model.fit, subset, settings[k], cohort, functional);
    const auto s = crbart::Summarize(curve, a.level);
    for (std::size_t j = 0; j < s.times.size(); ++j) {
      out << "curve," << k << ',' << FormatNumber(s.times[j]) << ',' << FormatNumber(s.mean[j])
          << ',' << FormatNumber(s.lower[j]) << ',' << FormatNumber(s.upper[j]) << '\n';
    }
  }
  if (a.time) {
    for (std::size_t k = 1; k < settings.size(); ++k) {
      const auto diff =
          crbart::PdDifference(model.fit, subset, settings[k], settings[0], cohort, *a.time);
      const auto s = crbart::SummarizeDraws(diff, a.level);
      out << "difference," << k << "-0," << FormatNumber(*a.time) << ',' << FormatNumber(s.mean)
          << ',' << FormatNumber(s.lower) << ',' << FormatNumber(s.upper) << '\n';
    }
    if (!a.individual.empty() && settings.size() >= 2) {
      const auto ind = crbart::IndividualDifferences(model.fit, cohort, subset, settings[1],
                                                     settings[0], *a.time, a.level);
      auto o = OpenOutput(a.individual);
      o << "subject,mean,lower,upper\n";
      for (std::size_t i = 0; i < ind.size(); ++i) {
        o << i + 1 << ',' << FormatNumber(ind[i].mean) << ',' << FormatNumber(ind[i].lower) << ','
          << FormatNumber(ind[i].upper) << '\n';
      }
      CloseOutput(o, a.individual);
    }
  }
  CloseOutput(out, a.out);
  Summary({{"command", "pd"}, {"output", a.out}, {"settings", settings.size()},
           {"cohort_rows", cohort.rows()}});
  return 0;
}

// ---- scenario options shared by simulate and bench ----

struct ScenarioArgs {
  std::string kase;
  std::optional<int> row, n, p;
  std::optional<std::string> censor;
};

void AddScenario(CLI::App* cmd, ScenarioArgs& s) {
  cmd->add_option("--case", s.kase, "cox|finegray|weibull|friedman (or 1-3)");
  cmd->add_option("--row", s.row, "Parameter row 1-4 within cases 1-3");
  cmd->add_option("--n", s.n, "Subjects per cohort");
  cmd->add_option("--p", s.p, "Covariates (friedman)");
  cmd->add_option("--censor", s.censor, "Censoring fraction or 'none'");
}

crbart::ScenarioConfig ScenarioFrom(const ConfigTree& tree, const ScenarioArgs& s,
                                    std::optional<double> default_censor) {
  crbart::ScenarioConfig cfg;
  if (!s.kase.empty()) {
    const crbart::ScenarioCase k = crbart::ParseCase(s.kase);
    if (k == crbart::ScenarioCase::kFriedman) {
      cfg = crbart::FriedmanScenario(s.n.value_or(500), s.p.value_or(10));
    } else {
      cfg = crbart::ScenarioRow(static_cast<int>(k) + 1, s.row.value_or(1));
      cfg.censor_target = default_censor;
    }
  } else if (tree.get_child_optional("scenario")) {
    cfg = crbart::ReadScenarioSection(tree, "scenario");
  } else {
    throw crbart::InputError("a scenario needs --case or a [scenario] config section");
  }
  if (s.n) cfg.n = *s.n;
  if (s.p) cfg.p = *s.p;
  if (s.censor) {
    if (*s.censor == "none") {
      cfg.censor_target.reset();
    } else {
      cfg.censor_target = crbart::ParseNumber(*s.censor, "--censor");
    }
  }
  cfg.Validate();
  return cfg;
}

// ---- simulate ----

struct SimulateArgs {
  Common common;
  ScenarioArgs scenario;
  std::string out, truth;
};

int RunSimulate(const SimulateArgs& a) {
  const ConfigTree tree = LoadConfig(a.common, {{"scenario", crbart::ScenarioKeys()}});
  crbart::ScenarioConfig cfg = ScenarioFrom(tree, a.scenario, 0.2);
  if (a.common.seed) cfg.seed = *a.common.seed;
  const crbart::Cohort cohort = crbart::GenerateCohort(cfg);
  crbart::CohortTable table;
  table.records = cohort.records;
  for (int j = 0; j < cfg.NumCovariates(); ++j) {
    table.covariate_names.push_back(cfg.kase == crbart::ScenarioCase::kFriedman
                                        ? "x" + std::to_string(j + 1)
                                        : std::string("group"));
  }
  {
    auto out = OpenOutput(a.out);
    crbart::WriteCohortCsv(out, table);
    CloseOutput(out, a.out);
  }
  if (!a.truth.empty()) {
    auto out = OpenOutput(a.truth);
    out << "subject,time,f1,f2,survival\n";
    for (std::size_t i = 0; i < cohort.records.size(); ++i) {
      const auto& r = cohort.records[i];
      const crbart::CifPair v = crbart::TrueCif(cfg, r.time, r.x);
      out << i + 1 << ',' << FormatNumber(r.time) << ',' << FormatNumber(v.f1) << ','
          << FormatNumber(v.f2) << ',' << FormatNumber(v.Survival()) << '\n';
    }
    CloseOutput(out, a.truth);
  }
  std::size_t censored = 0;
  for (const auto& r : cohort.records) censored += r.status == 0 ? 1 : 0;
  Summary({{"command", "simulate"},
           {"case", crbart::CaseName(cfg.kase)},
           {"output", a.out},
           {"records", cohort.records.size()},
           {"censored", censored},
           {"censor_rate", cohort.censor_rate},
           {"seed", cfg.seed}});
  return 0;
}

// ---- bench ----

struct BenchArgs {
  Common common;
  ScenarioArgs scenario;
  std::optional<int> replicates, bins;
  std::string methods, out, plot, label;
};

int RunBench(const BenchArgs& a) {
  const ConfigTree tree = LoadConfig(
      a.common, {{"scenario", crbart::ScenarioKeys()},
                 {"mcmc", crbart::McmcKeys()},
                 {"bench", {"replicates", "methods", "bins", "level", "label"}}});
  crbart::BenchSpec spec;
  spec.scenario = ScenarioFrom(tree, a.scenario, 0.2);
  spec.mcmc = crbart::ReadMcmcSection(tree, "mcmc");
  spec.replicates = a.replicates.value_or(tree.get<int>("bench.replicates", spec.replicates));
  spec.grid_bins = a.bins.value_or(tree.get<int>("bench.bins", spec.grid_bins));
  spec.level = tree.get<double>("bench.level", spec.level);
  spec.label = a.label.empty() ? tree.get<std::string>("bench.label", "") : a.label;
  const std::string methods =
      a.methods.empty() ? tree.get<std::string>("bench.methods", "m1,m2,aj") : a.methods;
  spec.methods.clear();
  std::stringstream ss(methods);
  for (std::string m; std::getline(ss, m, ',');) spec.methods.push_back(crbart::ParseBenchMethod(m));
  spec.master_seed = a.common.seed.value_or(spec.scenario.seed);
  spec.threads = a.common.threads.value_or(1);
  const crbart::MetricTable table = crbart::RunReplicates(spec);
  {
    auto out = OpenOutput(a.out);
    crbart::WriteMetricTable(out, table);
    CloseOutput(out, a.out);
  }
  if (!a.plot.empty()) {
    auto out = OpenOutput(a.plot);
    crbart::WriteMetricPlotData(out, table);
    CloseOutput(out, a.plot);
  }
  int failures = 0;
  for (const auto& r : table.rows) failures = std::max(failures, r.failures);
  Summary({{"command", "bench"},
           {"output", a.out},
           {"rows", table.rows.size()},
           {"replicates", spec.replicates},
           {"max_failures", failures},
           {"master_seed", table.master_seed}});
  return 0;
}

// ---- varsel ----

struct VarselArgs {
  std::string model, out;
};

int RunVarsel(const VarselArgs& a) {
  const crbart::ModelArtifact model = crbart::LoadModel(a.model);
  const crbart::CriskVarsel v = crbart::VarselProbabilities(model.fit);
  std::vector<std::string> names{"time"};
  names.insert(names.end(), model.covariate_names.begin(), model.covariate_names.end());
  auto out = OpenOutput(a.out);
  out << "variable,fit,probability,used_fraction\n";
  const std::pair<const char*, const crbart::VarselSummary*> parts[] = {
      {"first", &v.first}, {"second", &v.second}, {"pooled", &v.pooled}};
  for (const auto& [label, s] : parts) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      out << names[j] << ',' << label << ',' << FormatNumber(s->probability[j]) << ','
          << FormatNumber(s->used_fraction[j]) << '\n';
    }
  }
  CloseOutput(out, a.out);
  Summary({{"command", "varsel"}, {"output", a.out}, {"variables", names.size()}});
  return 0;
}

int Fail(int code, const std::string& message) {
  std::cerr << "crbart: " << message << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Competing-risks BART: fit, predict, partial dependence, simulation, benchmarks"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Fit a competing-risks model to a cohort CSV");
  AddCommon(c_fit, fit.common);
  c_fit->add_option("--data", fit.data, "Cohort CSV (time,status,cause,covariates...)")->required();
  c_fit->add_option("--out", fit.out, "Model artifact path")->required();
  c_fit->add_option("--method", fit.method, "m1 or m2");
  c_fit->add_option("--coarsen", fit.coarsen, "Round times up to multiples of this unit");

  PredictArgs pred;
  auto* c_pred = app.add_subcommand("predict", "Per-subject S/F1/F2 summaries");
  c_pred->add_option("--model", pred.model)->required();
  c_pred->add_option("--data", pred.data, "CSV with the model's covariate columns")->required();
  c_pred->add_option("--out", pred.out)->required();
  c_pred->add_option("--level", pred.level, "Credible level");
  Common pred_common;
  AddCommon(c_pred, pred_common);

  PdArgs pd;
  auto* c_pd = app.add_subcommand("pd", "Partial-dependence curves and differences");
  c_pd->add_option("--model", pd.model)->required();
  c_pd->add_option("--data", pd.data, "Cohort whose covariates are averaged over")->required();
  c_pd->add_option("--out", pd.out)->required();
  c_pd->add_option("--var", pd.vars, "Covariate held fixed (repeatable)")->required();
  c_pd->add_option("--at", pd.at, "Comma-separated values, one per --var (repeatable)")->required();
  c_pd->add_option("--functional", pd.functional, "s, f1 or f2");
  c_pd->add_option("--time", pd.time, "Time for F1 differences against the first setting");
  c_pd->add_option("--individual", pd.individual, "Per-subject difference CSV");
  c_pd->add_option("--level", pd.level, "Credible level");
  Common pd_common;
  AddCommon(c_pd, pd_common);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Draw a cohort from a simulation scenario");
  AddCommon(c_sim, sim.common);
  AddScenario(c_sim, sim.scenario);
  c_sim->add_option("--out", sim.out, "Cohort CSV")->required();
  c_sim->add_option("--truth", sim.truth, "True CIF values at each observed time");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Replicate study producing a metric table");
  AddCommon(c_bench, bench.common);
  AddScenario(c_bench, bench.scenario);
  c_bench->add_option("--replicates", bench.replicates);
  c_bench->add_option("--methods", bench.methods, "Comma-separated subset of m1,m2,aj");
  c_bench->add_option("--bins", bench.bins, "Quantile bins for the fitting grid (0 = raw times)");
  c_bench->add_option("--label", bench.label, "Scenario label in the output");
  c_bench->add_option("--out", bench.out, "Metric table CSV")->required();
  c_bench->add_option("--plot", bench.plot, "Long-format plot data CSV");

  VarselArgs vs;
  auto* c_vs = app.add_subcommand("varsel", "Variable selection probabilities");
  c_vs->add_option("--model", vs.model)->required();
  c_vs->add_option("--out", vs.out)->required();
  Common vs_common;
  AddCommon(c_vs, vs_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail(kExitValidation, e.what());
  }

  try {
    if (*c_fit) return RunFit(fit);
    if (*c_pred) return RunPredict(pred);
    if (*c_pd) return RunPd(pd);
    if (*c_sim) return RunSimulate(sim);
    if (*c_bench) return RunBench(bench);
    if (*c_vs) return RunVarsel(vs);
  } catch (const crbart::InputError& e) {
    return Fail(kExitValidation, e.what());
  } catch (const boost::property_tree::ptree_error& e) {
    return Fail(kExitValidation, std::string("config: ") + e.what());
  } catch (const std::exception& e) {
    return Fail(kExitRuntime, e.what());
  }
  return Fail(kExitValidation, "no command given");
}

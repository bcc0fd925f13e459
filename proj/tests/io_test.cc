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


#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "crbart/io.h"
#include "test_util.h"

namespace crbart {
namespace {

using testing::ToyCohort;

std::string ErrorOf(const std::string& csv) {
  std::istringstream in(csv);
  try {
    ParseCohortCsv(in);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

TEST(Numbers, FormatAndParse) {
  EXPECT_EQ(FormatNumber(0.1), "0.1");
  EXPECT_EQ(FormatNumber(2.0), "2");
  EXPECT_EQ(FormatNumber(std::numeric_limits<double>::quiet_NaN()), "NA");
  for (double v : {1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    EXPECT_EQ(ParseNumber(FormatNumber(v), "t"), v);
  }
  EXPECT_THROW(ParseNumber("1.5x", "t"), InputError);
  EXPECT_THROW(ParseNumber("", "t"), InputError);
}

TEST(CohortCsv, ErrorsNameTheRow) {
  EXPECT_NE(ErrorOf("time,status,cause\n1,1,1\n-2,1,1\n").find("row 2"), std::string::npos);
  EXPECT_NE(ErrorOf("time,status,cause\n1,1,3\n").find("row 1"), std::string::npos);
  EXPECT_NE(ErrorOf("time,status,cause\n1,0,2\n").find("cause 0"), std::string::npos);
  EXPECT_NE(ErrorOf("time,status,cause\n1,1,0\n").find("cause 1 or 2"), std::string::npos);
  EXPECT_NE(ErrorOf("time,status,cause\n1,1\n").find("row 1"), std::string::npos);
  EXPECT_NE(ErrorOf("time,status,cause\n").find("no records"), std::string::npos);
  EXPECT_NE(ErrorOf("time,status\n1,0\n").find("cause"), std::string::npos);
  EXPECT_NE(ErrorOf("time,status,cause,x\n1,1,1,abc\n").find("row 1"), std::string::npos);
  EXPECT_NE(ErrorOf("").find("empty"), std::string::npos);
}

TEST(CohortCsv, RoundTrip) {
  CohortTable cohort;
  cohort.covariate_names = {"x1"};
  cohort.records = ToyCohort();
  std::ostringstream out;
  WriteCohortCsv(out, cohort);
  std::istringstream in(out.str());
  const CohortTable back = ParseCohortCsv(in);
  EXPECT_EQ(back.covariate_names, cohort.covariate_names);
  ASSERT_EQ(back.records.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.records[i].time, cohort.records[i].time);
    EXPECT_EQ(back.records[i].status, cohort.records[i].status);
    EXPECT_EQ(back.records[i].cause, cohort.records[i].cause);
    EXPECT_EQ(back.records[i].x, cohort.records[i].x);
  }
  EXPECT_EQ(CohortChecksum(back), CohortChecksum(cohort));
  cohort.records[0].time = 2.6;
  EXPECT_NE(CohortChecksum(back), CohortChecksum(cohort));
}

TEST(Covariates, SelectedByName) {
  std::istringstream in("a,b,c\n1,2,3\n4,5,6\n");
  const CsvTable t = ReadCsv(in);
  const Matrix m = ReadCovariates(t, {"c", "a"});
  ASSERT_EQ(m.rows(), 2);
  EXPECT_EQ(m(0, 0), 3.0);
  EXPECT_EQ(m(1, 1), 4.0);
  EXPECT_THROW(ReadCovariates(t, {"d"}), InputError);
}

TEST(Config, UnknownKeysAreRejected) {
  const std::map<std::string, std::set<std::string>> allowed{{"mcmc", McmcKeys()}};
  std::istringstream ok("[mcmc]\nm = 50\nthin = 2\n");
  EXPECT_NO_THROW(RejectUnknownKeys(ParseConfig(ok), allowed));
  std::istringstream typo("[mcmc]\nburnin = 50\n");
  EXPECT_THROW(RejectUnknownKeys(ParseConfig(typo), allowed), InputError);
  std::istringstream section("[sampler]\nm = 50\n");
  EXPECT_THROW(RejectUnknownKeys(ParseConfig(section), allowed), InputError);
  std::istringstream top("m = 50\n");
  EXPECT_THROW(RejectUnknownKeys(ParseConfig(top), allowed), InputError);
}

TEST(Config, BadValuesNameTheKey) {
  std::istringstream in("[mcmc]\nm = many\n");
  try {
    ReadMcmcSection(ParseConfig(in), "mcmc");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("[mcmc] m"), std::string::npos);
  }
  std::istringstream missing("[other]\nx = 1\n");
  EXPECT_THROW(ReadScenarioSection(ParseConfig(missing), "scenario"), InputError);
}

TEST(Config, ScenarioRowsRoundTrip) {
  for (ScenarioConfig row : ScenarioRows()) {
    for (double c : {0.2, 0.5}) {
      row.censor_target = c;
      row.seed = 77;
      ConfigTree tree;
      WriteScenarioSection(tree, "scenario", row);
      std::istringstream in(ConfigToString(tree));
      EXPECT_EQ(ReadScenarioSection(ParseConfig(in), "scenario"), row);
    }
  }
  ScenarioConfig f = FriedmanScenario(300, 100);
  ConfigTree tree;
  WriteScenarioSection(tree, "scenario", f);
  std::istringstream in(ConfigToString(tree));
  EXPECT_EQ(ReadScenarioSection(ParseConfig(in), "scenario"), f);
}

TEST(Config, McmcRoundTrip) {
  McmcConfig cfg;
  cfg.m = 77;
  cfg.kappa = 1.5;
  cfg.burn_in = 33;
  cfg.thin = 4;
  cfg.n_draws = 123;
  cfg.n_chains = 3;
  cfg.seed = 18446744073709551557ULL;
  cfg.alpha = 0.9;
  cfg.gamma = 1.5;
  cfg.dart = true;
  cfg.dart_a = 0.7;
  cfg.dart_rho = 12;
  cfg.dart_theta_random = false;
  ConfigTree tree;
  WriteMcmcSection(tree, "mcmc", cfg);
  std::istringstream in(ConfigToString(tree));
  const McmcConfig back = ReadMcmcSection(ParseConfig(in), "mcmc");
  EXPECT_EQ(back.m, cfg.m);
  EXPECT_EQ(back.kappa, cfg.kappa);
  EXPECT_EQ(back.burn_in, cfg.burn_in);
  EXPECT_EQ(back.thin, cfg.thin);
  EXPECT_EQ(back.n_draws, cfg.n_draws);
  EXPECT_EQ(back.n_chains, cfg.n_chains);
  EXPECT_EQ(back.seed, cfg.seed);
  EXPECT_EQ(back.alpha, cfg.alpha);
  EXPECT_EQ(back.gamma, cfg.gamma);
  EXPECT_EQ(back.dart, cfg.dart);
  EXPECT_EQ(back.dart_a, cfg.dart_a);
  EXPECT_EQ(back.dart_rho, cfg.dart_rho);
  EXPECT_EQ(back.dart_theta_random, cfg.dart_theta_random);
}

class ModelFile : public ::testing::Test {
 protected:
  static ModelArtifact Make(Method method) {
    McmcConfig cfg;
    cfg.m = 10;
    cfg.burn_in = 10;
    cfg.thin = 1;
    cfg.n_draws = 15;
    cfg.seed = 5;
    cfg.dart = true;
    ModelArtifact a;
    const auto cohort = ToyCohort();
    a.fit = FitCrisk(method, cohort, BuildTimeGrid(cohort), cfg);
    a.covariate_names = {"x1"};
    a.data_checksum = "abc";
    a.config = cfg;
    return a;
  }
};

TEST_F(ModelFile, SaveLoadPreservesPredictions) {
  for (Method m : {Method::kM1, Method::kM2}) {
    const ModelArtifact a = Make(m);
    const std::string path =
        (std::filesystem::temp_directory_path() / "crbart_io_test_model.json").string();
    SaveModel(a, path);
    const ModelArtifact b = LoadModel(path);
    std::filesystem::remove(path);
    EXPECT_EQ(b.fit.method, m);
    EXPECT_EQ(b.covariate_names, a.covariate_names);
    EXPECT_EQ(b.data_checksum, "abc");
    EXPECT_EQ(b.config.seed, 5u);
    EXPECT_EQ(b.fit.grid.times, a.fit.grid.times);
    for (double x : {0.0, 0.5, 1.0}) {
      const std::vector<double> xv{x};
      const CurveDraws ca = AllCurves(a.fit, xv), cb = AllCurves(b.fit, xv);
      EXPECT_LE((ca.cif1.values - cb.cif1.values).cwiseAbs().maxCoeff(), 1e-15);
      EXPECT_LE((ca.cif2.values - cb.cif2.values).cwiseAbs().maxCoeff(), 1e-15);
      EXPECT_LE((ca.survival.values - cb.survival.values).cwiseAbs().maxCoeff(), 1e-15);
    }
    EXPECT_EQ(SerializeModel(b), SerializeModel(a));
  }
}

TEST_F(ModelFile, CorruptFilesAreRejected) {
  const std::string text = SerializeModel(Make(Method::kM2));
  EXPECT_THROW(DeserializeModel(text.substr(0, text.size() / 2)), FormatError);
  EXPECT_THROW(DeserializeModel(""), FormatError);
  EXPECT_THROW(DeserializeModel("{\"format\":\"other\"}"), FormatError);

  nlohmann::json j = nlohmann::json::parse(text);
  j["data_checksum"] = "abd";
  EXPECT_THROW(DeserializeModel(j.dump()), FormatError);

  j = nlohmann::json::parse(text);
  j["version"] = kModelFormatVersion + 1;
  try {
    DeserializeModel(j.dump());
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
  EXPECT_THROW(LoadModel("/nonexistent/crbart/model.json"), InputError);
}

TEST(MetricTable, WritesOneLinePerRow) {
  MetricTable t;
  t.master_seed = 1;
  MetricRow r;
  r.scenario = "case1";
  r.method = "aj";
  r.group = 0;
  r.quantile = 0.5;
  t.rows = {r, r};
  std::ostringstream out;
  WriteMetricTable(out, t);
  std::istringstream in(out.str());
  const CsvTable back = ReadCsv(in);
  EXPECT_EQ(back.rows.size(), 2u);
  EXPECT_GE(back.Column("method"), 0);
}

}  // namespace
}  // namespace crbart

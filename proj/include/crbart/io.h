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


#ifndef CRBART_IO_H_
#define CRBART_IO_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "crbart/crisk.h"
#include "crbart/discrete_time.h"
#include "crbart/eval.h"
#include "crbart/mcmc.h"
#include "crbart/simgen.h"

namespace crbart {

// Shortest round-trip decimal form; NaN is written as NA.
std::string FormatNumber(double v);
// Parses a full-cell number; throws InputError naming `where` otherwise.
double ParseNumber(const std::string& cell, const std::string& where);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or -1.
  int Column(const std::string& name) const;
};

// Comma-separated values with a header line. Rows must match the header
// width; errors name the 1-based data row.
CsvTable ReadCsv(std::istream& in);
CsvTable ReadCsvFile(const std::string& path);

struct CohortTable {
  std::vector<std::string> covariate_names;
  std::vector<CompetingRisksRecord> records;
};

// Required columns time, status, cause; every other column is a numeric
// covariate in file order.
CohortTable ParseCohortCsv(std::istream& in);
CohortTable ReadCohortCsv(const std::string& path);
void WriteCohortCsv(std::ostream& out, const CohortTable& cohort);

// Numeric covariate matrix; `names` must all be present and are taken in
// that order.
Matrix ReadCovariates(const CsvTable& table, const std::vector<std::string>& names);

void WriteMetricTable(std::ostream& out, const MetricTable& table);
// One row per (group, quantile, method, metric) for plotting.
void WriteMetricPlotData(std::ostream& out, const MetricTable& table);

// key=value configuration with [sections].
using ConfigTree = boost::property_tree::ptree;

ConfigTree ParseConfig(std::istream& in);
ConfigTree ReadConfigFile(const std::string& path);
std::string ConfigToString(const ConfigTree& tree);
// Throws InputError for any section or key outside `allowed`.
void RejectUnknownKeys(const ConfigTree& tree,
                       const std::map<std::string, std::set<std::string>>& allowed);

const std::set<std::string>& McmcKeys();
const std::set<std::string>& ScenarioKeys();

// Reads the [section] keys that are present over `defaults`.
McmcConfig ReadMcmcSection(const ConfigTree& tree, const std::string& section,
                           McmcConfig defaults = {});
void WriteMcmcSection(ConfigTree& tree, const std::string& section, const McmcConfig& cfg);
ScenarioConfig ReadScenarioSection(const ConfigTree& tree, const std::string& section);
void WriteScenarioSection(ConfigTree& tree, const std::string& section,
                          const ScenarioConfig& cfg);

std::uint64_t Fnv1a64(const std::string& bytes);
std::string HexDigest(std::uint64_t v);
// Checksum of the canonical CSV form of a cohort.
std::string CohortChecksum(const CohortTable& cohort);

struct ModelArtifact {
  CriskFit fit;
  std::vector<std::string> covariate_names;
  std::string data_checksum;
  McmcConfig config;
};

inline constexpr int kModelFormatVersion = 1;

std::string SerializeModel(const ModelArtifact& model);
ModelArtifact DeserializeModel(const std::string& text);
void SaveModel(const ModelArtifact& model, const std::string& path);
ModelArtifact LoadModel(const std::string& path);

}  // namespace crbart

#endif  // CRBART_IO_H_

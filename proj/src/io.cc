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


#include "crbart/io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/tokenizer.hpp>
#include <nlohmann/json.hpp>

namespace crbart {

using nlohmann::json;

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double ParseNumber(const std::string& cell, const std::string& where) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != last) {
    throw InputError(where + ": '" + cell + "' is not a number");
  }
  return v;
}

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitCsvLine(const std::string& line, const std::string& where) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  std::vector<std::string> cells;
  try {
    Tokenizer tok(line, boost::escaped_list_separator<char>('\\', ',', '"'));
    for (const auto& cell : tok) cells.push_back(Trim(cell));
  } catch (const boost::escaped_list_error& e) {
    throw InputError(where + ": malformed CSV (" + e.what() + ")");
  }
  return cells;
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

int ParseIndicator(const std::string& cell, const std::string& where, int max_value) {
  const double v = ParseNumber(cell, where);
  if (v != std::floor(v) || v < 0 || v > max_value) {
    throw InputError(where + ": '" + cell + "' must be an integer in 0.." + std::to_string(max_value));
  }
  return static_cast<int>(v);
}

}  // namespace

int CsvTable::Column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return static_cast<int>(c);
  }
  return -1;
}

CsvTable ReadCsv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    if (!have_header) {
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      table.header = SplitCsvLine(line, "header");
      have_header = true;
      continue;
    }
    ++row;
    const std::string where = "row " + std::to_string(row);
    auto cells = SplitCsvLine(line, where);
    if (cells.size() != table.header.size()) {
      throw InputError(where + ": expected " + std::to_string(table.header.size()) +
                       " cells, found " + std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) throw InputError("CSV input is empty (no header)");
  return table;
}

CsvTable ReadCsvFile(const std::string& path) {
  auto in = OpenInput(path);
  return ReadCsv(in);
}

CohortTable ParseCohortCsv(std::istream& in) {
  const CsvTable table = ReadCsv(in);
  const int c_time = table.Column("time");
  const int c_status = table.Column("status");
  const int c_cause = table.Column("cause");
  for (const auto& [name, col] : {std::pair{"time", c_time}, {"status", c_status}, {"cause", c_cause}}) {
    if (col < 0) throw InputError(std::string("cohort CSV is missing the '") + name + "' column");
  }
  CohortTable out;
  std::vector<int> cov_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const int ci = static_cast<int>(c);
    if (ci == c_time || ci == c_status || ci == c_cause) continue;
    cov_cols.push_back(ci);
    out.covariate_names.push_back(table.header[c]);
  }
  if (table.rows.empty()) throw InputError("no records");
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    const std::string where = "row " + std::to_string(r + 1);
    CompetingRisksRecord rec;
    rec.time = ParseNumber(cells[c_time], where + " time");
    if (!(rec.time > 0.0) || !std::isfinite(rec.time)) {
      throw InputError(where + ": time must be positive and finite");
    }
    rec.status = ParseIndicator(cells[c_status], where + " status", 1);
    rec.cause = ParseIndicator(cells[c_cause], where + " cause", 2);
    if (rec.status == 1 && rec.cause == 0) {
      throw InputError(where + ": status 1 requires cause 1 or 2");
    }
    if (rec.status == 0 && rec.cause != 0) {
      throw InputError(where + ": censored rows (status 0) must have cause 0");
    }
    for (std::size_t k = 0; k < cov_cols.size(); ++k) {
      const double v = ParseNumber(cells[cov_cols[k]], where + " " + out.covariate_names[k]);
      if (!std::isfinite(v)) throw InputError(where + ": covariate is not finite");
      rec.x.push_back(v);
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

CohortTable ReadCohortCsv(const std::string& path) {
  auto in = OpenInput(path);
  return ParseCohortCsv(in);
}

void WriteCohortCsv(std::ostream& out, const CohortTable& cohort) {
  out << "time,status,cause";
  for (const auto& n : cohort.covariate_names) out << ',' << n;
  out << '\n';
  for (const auto& r : cohort.records) {
    out << FormatNumber(r.time) << ',' << r.status << ',' << r.cause;
    for (double v : r.x) out << ',' << FormatNumber(v);
    out << '\n';
  }
}

Matrix ReadCovariates(const CsvTable& table, const std::vector<std::string>& names) {
  std::vector<int> cols;
  for (const auto& n : names) {
    const int c = table.Column(n);
    if (c < 0) throw InputError("covariate CSV is missing the '" + n + "' column");
    cols.push_back(c);
  }
  if (table.rows.empty()) throw InputError("covariate CSV has no rows");
  Matrix x(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::string where = "row " + std::to_string(r + 1) + " " + names[k];
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
          ParseNumber(table.rows[r][cols[k]], where);
    }
  }
  return x;
}

void WriteMetricTable(std::ostream& out, const MetricTable& table) {
  out << "scenario,censor,group,quantile,eval_time,method,f1_truth,f1_bias,f1_rmse,f1_coverage,"
         "f1_width,s_truth,s_bias,s_rmse,s_coverage,s_width,replicates_used,failures,master_seed\n";
  for (const auto& r : table.rows) {
    out << r.scenario << ',' << r.censor << ',' << r.group << ',' << FormatNumber(r.quantile)
        << ',' << FormatNumber(r.eval_time) << ',' << r.method;
    for (double v : {r.f1_truth, r.f1_bias, r.f1_rmse, r.f1_coverage, r.f1_width, r.s_truth,
                     r.s_bias, r.s_rmse, r.s_coverage, r.s_width}) {
      out << ',' << FormatNumber(v);
    }
    out << ',' << r.replicates_used << ',' << r.failures << ',' << table.master_seed << '\n';
  }
}

void WriteMetricPlotData(std::ostream& out, const MetricTable& table) {
  out << "scenario,censor,group,quantile,method,metric,value\n";
  for (const auto& r : table.rows) {
    const std::pair<const char*, double> metrics[] = {
        {"f1_bias", r.f1_bias},         {"f1_rmse", r.f1_rmse}, {"f1_coverage", r.f1_coverage},
        {"f1_width", r.f1_width},       {"s_bias", r.s_bias},   {"s_rmse", r.s_rmse},
        {"s_coverage", r.s_coverage},   {"s_width", r.s_width}};
    for (const auto& [name, value] : metrics) {
      if (std::isnan(value)) continue;
      out << r.scenario << ',' << r.censor << ',' << r.group << ',' << FormatNumber(r.quantile)
          << ',' << r.method << ',' << name << ',' << FormatNumber(value) << '\n';
    }
  }
}

ConfigTree ParseConfig(std::istream& in) {
  ConfigTree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return tree;
}

ConfigTree ReadConfigFile(const std::string& path) {
  auto in = OpenInput(path);
  return ParseConfig(in);
}

std::string ConfigToString(const ConfigTree& tree) {
  std::ostringstream os;
  boost::property_tree::ini_parser::write_ini(os, tree);
  return os.str();
}

void RejectUnknownKeys(const ConfigTree& tree,
                       const std::map<std::string, std::set<std::string>>& allowed) {
  static const std::set<std::string> kNone;
  const auto top = allowed.find("");
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      if (top == allowed.end() || !top->second.count(name)) {
        throw InputError("config: unknown key '" + name + "'");
      }
      continue;
    }
    const auto section = allowed.find(name);
    if (section == allowed.end() || name.empty()) {
      throw InputError("config: unknown section [" + name + "]");
    }
    for (const auto& [key, value] : node) {
      if (!section->second.count(key)) {
        throw InputError("config: unknown key '" + key + "' in [" + name + "]");
      }
    }
  }
}

const std::set<std::string>& McmcKeys() {
  static const std::set<std::string> keys{
      "m",     "kappa", "burn_in", "thin", "n_draws", "n_chains", "seed",   "threads",
      "alpha", "gamma", "nu",      "dart", "dart_a",  "dart_b",   "dart_rho", "dart_theta_random"};
  return keys;
}

const std::set<std::string>& ScenarioKeys() {
  static const std::set<std::string> keys{"case", "lambda01", "lambda02", "beta1", "beta2", "p0",
                                          "gamma0", "n", "p", "censor", "seed"};
  return keys;
}

namespace {

std::string Where(const std::string& section, const std::string& key) {
  return "config [" + section + "] " + key;
}

double GetDouble(const ConfigTree& s, const std::string& section, const std::string& key,
                 double fallback) {
  const auto v = s.get_optional<std::string>(key);
  return v ? ParseNumber(Trim(*v), Where(section, key)) : fallback;
}

long long GetInteger(const ConfigTree& s, const std::string& section, const std::string& key,
                     long long fallback) {
  const auto v = s.get_optional<std::string>(key);
  if (!v) return fallback;
  const std::string cell = Trim(*v);
  long long out = 0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw InputError(Where(section, key) + ": '" + cell + "' is not an integer");
  }
  return out;
}

std::uint64_t GetSeed(const ConfigTree& s, const std::string& section, const std::string& key,
                      std::uint64_t fallback) {
  const auto v = s.get_optional<std::string>(key);
  if (!v) return fallback;
  const std::string cell = Trim(*v);
  std::uint64_t out = 0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw InputError(Where(section, key) + ": '" + cell + "' is not a nonnegative integer");
  }
  return out;
}

bool GetBool(const ConfigTree& s, const std::string& section, const std::string& key,
             bool fallback) {
  const auto v = s.get_optional<std::string>(key);
  if (!v) return fallback;
  const std::string cell = Trim(*v);
  if (cell == "true" || cell == "1") return true;
  if (cell == "false" || cell == "0") return false;
  throw InputError(Where(section, key) + ": '" + cell + "' is not true/false");
}

int ToInt(long long v, const std::string& where) {
  if (v < INT32_MIN || v > INT32_MAX) throw InputError(where + " is out of range");
  return static_cast<int>(v);
}

}  // namespace

McmcConfig ReadMcmcSection(const ConfigTree& tree, const std::string& section,
                           McmcConfig defaults) {
  const auto node = tree.get_child_optional(section);
  if (!node) return defaults;
  const ConfigTree& s = *node;
  McmcConfig c = defaults;
  auto get_int = [&](const char* key, int fallback) {
    return ToInt(GetInteger(s, section, key, fallback), Where(section, key));
  };
  c.m = get_int("m", c.m);
  c.kappa = GetDouble(s, section, "kappa", c.kappa);
  c.burn_in = get_int("burn_in", c.burn_in);
  c.thin = get_int("thin", c.thin);
  c.n_draws = get_int("n_draws", c.n_draws);
  c.n_chains = get_int("n_chains", c.n_chains);
  c.seed = GetSeed(s, section, "seed", c.seed);
  c.threads = get_int("threads", c.threads);
  c.alpha = GetDouble(s, section, "alpha", c.alpha);
  c.gamma = GetDouble(s, section, "gamma", c.gamma);
  c.nu = GetDouble(s, section, "nu", c.nu);
  c.dart = GetBool(s, section, "dart", c.dart);
  c.dart_a = GetDouble(s, section, "dart_a", c.dart_a);
  c.dart_b = GetDouble(s, section, "dart_b", c.dart_b);
  c.dart_rho = GetDouble(s, section, "dart_rho", c.dart_rho);
  c.dart_theta_random = GetBool(s, section, "dart_theta_random", c.dart_theta_random);
  return c;
}

void WriteMcmcSection(ConfigTree& tree, const std::string& section, const McmcConfig& c) {
  ConfigTree s;
  s.put("m", c.m);
  s.put("kappa", FormatNumber(c.kappa));
  s.put("burn_in", c.burn_in);
  s.put("thin", c.thin);
  s.put("n_draws", c.n_draws);
  s.put("n_chains", c.n_chains);
  s.put("seed", c.seed);
  s.put("threads", c.threads);
  s.put("alpha", FormatNumber(c.alpha));
  s.put("gamma", FormatNumber(c.gamma));
  s.put("nu", FormatNumber(c.nu));
  s.put("dart", c.dart ? "true" : "false");
  s.put("dart_a", FormatNumber(c.dart_a));
  s.put("dart_b", FormatNumber(c.dart_b));
  s.put("dart_rho", FormatNumber(c.dart_rho));
  s.put("dart_theta_random", c.dart_theta_random ? "true" : "false");
  tree.put_child(section, s);
}

ScenarioConfig ReadScenarioSection(const ConfigTree& tree, const std::string& section) {
  const auto node = tree.get_child_optional(section);
  if (!node) throw InputError("config is missing the [" + section + "] section");
  const ConfigTree& s = *node;
  const auto kase = s.get_optional<std::string>("case");
  if (!kase) throw InputError(Where(section, "case") + " is required");
  ScenarioConfig c;
  c.kase = ParseCase(Trim(*kase));
  if (c.kase == ScenarioCase::kFriedman) c = FriedmanScenario(c.n, c.p);
  c.lambda01 = GetDouble(s, section, "lambda01", c.lambda01);
  c.lambda02 = GetDouble(s, section, "lambda02", c.lambda02);
  c.beta1 = GetDouble(s, section, "beta1", c.beta1);
  c.beta2 = GetDouble(s, section, "beta2", c.beta2);
  c.p0 = GetDouble(s, section, "p0", c.p0);
  c.gamma0 = GetDouble(s, section, "gamma0", c.gamma0);
  c.n = ToInt(GetInteger(s, section, "n", c.n), Where(section, "n"));
  c.p = ToInt(GetInteger(s, section, "p", c.p), Where(section, "p"));
  if (const auto censor = s.get_optional<std::string>("censor")) {
    const std::string cell = Trim(*censor);
    if (cell == "none") {
      c.censor_target.reset();
    } else {
      c.censor_target = ParseNumber(cell, Where(section, "censor"));
    }
  }
  c.seed = GetSeed(s, section, "seed", c.seed);
  c.Validate();
  return c;
}

void WriteScenarioSection(ConfigTree& tree, const std::string& section,
                          const ScenarioConfig& c) {
  ConfigTree s;
  s.put("case", CaseName(c.kase));
  s.put("lambda01", FormatNumber(c.lambda01));
  s.put("lambda02", FormatNumber(c.lambda02));
  s.put("beta1", FormatNumber(c.beta1));
  s.put("beta2", FormatNumber(c.beta2));
  s.put("p0", FormatNumber(c.p0));
  s.put("gamma0", FormatNumber(c.gamma0));
  s.put("n", c.n);
  s.put("p", c.p);
  s.put("censor", c.censor_target ? FormatNumber(*c.censor_target) : std::string("none"));
  s.put("seed", c.seed);
  tree.put_child(section, s);
}

std::uint64_t Fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string HexDigest(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string CohortChecksum(const CohortTable& cohort) {
  std::ostringstream os;
  WriteCohortCsv(os, cohort);
  return HexDigest(Fnv1a64(os.str()));
}

namespace {

json TreeToJson(std::span<const FrozenTree::Node> nodes, std::size_t i) {
  const auto& n = nodes[i];
  if (n.variable < 0) return json{{"leaf", n.value}};
  return json{{"var", n.variable},
              {"cut", n.value},
              {"left", TreeToJson(nodes, i + 1)},
              {"right", TreeToJson(nodes, static_cast<std::size_t>(n.right))}};
}

void TreeFromJson(const json& j, std::vector<FrozenTree::Node>& out, int depth) {
  if (depth > 512) throw FormatError("model file: tree nesting is too deep");
  if (j.contains("leaf")) {
    out.push_back({-1, -1, j.at("leaf").get<double>()});
    return;
  }
  const std::size_t self = out.size();
  const int var = j.at("var").get<int>();
  if (var < 0) throw FormatError("model file: negative split variable");
  out.push_back({var, -1, j.at("cut").get<double>()});
  TreeFromJson(j.at("left"), out, depth + 1);
  out[self].right = static_cast<std::int32_t>(out.size());
  TreeFromJson(j.at("right"), out, depth + 1);
}

json FitToJson(const ProbitFit& fit) {
  json draws = json::array();
  for (const auto& ens : fit.draws) {
    json trees = json::array();
    for (const auto& t : ens.trees) trees.push_back(TreeToJson(t.nodes(), 0));
    draws.push_back(std::move(trees));
  }
  return json{{"offset", fit.offset},
              {"num_vars", fit.num_vars},
              {"draws", std::move(draws)},
              {"split_counts", fit.split_counts},
              {"split_probs", fit.split_probs}};
}

ProbitFit FitFromJson(const json& j, const McmcConfig& cfg) {
  ProbitFit fit;
  fit.offset = j.at("offset").get<double>();
  fit.num_vars = j.at("num_vars").get<int>();
  fit.config = cfg;
  for (const auto& trees : j.at("draws")) {
    FrozenEnsemble ens;
    for (const auto& t : trees) {
      std::vector<FrozenTree::Node> nodes;
      TreeFromJson(t, nodes, 0);
      for (const auto& n : nodes) {
        if (n.variable >= fit.num_vars) throw FormatError("model file: split variable out of range");
      }
      ens.trees.emplace_back(std::move(nodes));
    }
    fit.draws.push_back(std::move(ens));
  }
  fit.split_counts = j.at("split_counts").get<std::vector<std::vector<int>>>();
  fit.split_probs = j.at("split_probs").get<std::vector<std::vector<double>>>();
  return fit;
}

json McmcToJson(const McmcConfig& c) {
  return json{{"m", c.m},
              {"kappa", c.kappa},
              {"burn_in", c.burn_in},
              {"thin", c.thin},
              {"n_draws", c.n_draws},
              {"n_chains", c.n_chains},
              {"seed", c.seed},
              {"threads", c.threads},
              {"alpha", c.alpha},
              {"gamma", c.gamma},
              {"nu", c.nu},
              {"dart", c.dart},
              {"dart_a", c.dart_a},
              {"dart_b", c.dart_b},
              {"dart_rho", c.dart_rho},
              {"dart_theta_random", c.dart_theta_random}};
}

McmcConfig McmcFromJson(const json& j) {
  McmcConfig c;
  c.m = j.at("m").get<int>();
  c.kappa = j.at("kappa").get<double>();
  c.burn_in = j.at("burn_in").get<int>();
  c.thin = j.at("thin").get<int>();
  c.n_draws = j.at("n_draws").get<int>();
  c.n_chains = j.at("n_chains").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.threads = j.at("threads").get<int>();
  c.alpha = j.at("alpha").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.nu = j.at("nu").get<double>();
  c.dart = j.at("dart").get<bool>();
  c.dart_a = j.at("dart_a").get<double>();
  c.dart_b = j.at("dart_b").get<double>();
  c.dart_rho = j.at("dart_rho").get<double>();
  c.dart_theta_random = j.at("dart_theta_random").get<bool>();
  return c;
}

constexpr const char* kFormatName = "crbart-model";

}  // namespace

std::string SerializeModel(const ModelArtifact& model) {
  json j;
  j["format"] = kFormatName;
  j["version"] = kModelFormatVersion;
  j["method"] = model.fit.method == Method::kM1 ? "m1" : "m2";
  j["grid"] = model.fit.grid.times;
  j["covariates"] = model.covariate_names;
  j["data_checksum"] = model.data_checksum;
  j["config"] = McmcToJson(model.config);
  j["fits"] = json{{"first", FitToJson(model.fit.first)}, {"second", FitToJson(model.fit.second)}};
  j["checksum"] = HexDigest(Fnv1a64(j.dump()));
  return j.dump() + "\n";
}

ModelArtifact DeserializeModel(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw FormatError("model file is truncated or not valid JSON");
  }
  try {
    if (!j.is_object() || j.value("format", "") != kFormatName) {
      throw FormatError("not a crbart model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw FormatError("model format version " + std::to_string(version) +
                        " is not supported (expected " + std::to_string(kModelFormatVersion) + ")");
    }
    const std::string checksum = j.at("checksum").get<std::string>();
    j.erase("checksum");
    if (HexDigest(Fnv1a64(j.dump())) != checksum) {
      throw FormatError("model file checksum mismatch");
    }
    ModelArtifact m;
    const std::string method = j.at("method").get<std::string>();
    if (method != "m1" && method != "m2") throw FormatError("model file: unknown method " + method);
    m.fit.method = method == "m1" ? Method::kM1 : Method::kM2;
    m.fit.grid.times = j.at("grid").get<std::vector<double>>();
    m.fit.grid.Validate();
    m.covariate_names = j.at("covariates").get<std::vector<std::string>>();
    m.data_checksum = j.at("data_checksum").get<std::string>();
    m.config = McmcFromJson(j.at("config"));
    m.fit.first = FitFromJson(j.at("fits").at("first"), m.config);
    m.fit.second = FitFromJson(j.at("fits").at("second"), m.config);
    if (m.fit.first.num_draws() != m.fit.second.num_draws() ||
        m.fit.first.num_vars != m.fit.second.num_vars ||
        m.fit.first.num_vars != static_cast<int>(m.covariate_names.size()) + 1) {
      throw FormatError("model file: sub-fits are inconsistent");
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file is malformed: ") + e.what());
  } catch (const FormatError&) {
    throw;
  } catch (const InputError& e) {
    throw FormatError(std::string("model file is malformed: ") + e.what());
  }
}

void SaveModel(const ModelArtifact& model, const std::string& path) {
  const std::string text = SerializeModel(model);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out.flush()) throw InputError("failed writing '" + path + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InputError("cannot move model into place at '" + path + "': " + ec.message());
}

ModelArtifact LoadModel(const std::string& path) {
  auto in = OpenInput(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return DeserializeModel(buf.str());
}

}  // namespace crbart

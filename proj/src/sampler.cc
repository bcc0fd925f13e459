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

#include "crbart/sampler.h"

#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "crbart/numerics.h"

namespace crbart {

void TreePrior::Validate(int num_vars) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("tree prior alpha must lie in (0, 1)");
  if (!(gamma >= 0.0)) throw InputError("tree prior gamma must be >= 0");
  if (!(nu > 0.0) || !(lambda > 0.0)) throw InputError("variance prior needs nu > 0 and lambda > 0");
  if (!split_probs.empty()) {
    if (static_cast<int>(split_probs.size()) != num_vars) {
      throw InputError("split_probs has " + std::to_string(split_probs.size()) +
                       " entries for " + std::to_string(num_vars) + " variables");
    }
    double total = 0.0;
    for (double s : split_probs) {
      if (!(s >= 0.0)) throw InputError("split_probs entries must be nonnegative");
      total += s;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("split_probs must sum to 1");
  }
  if (dart) {
    if (!(dart->theta > 0.0 && dart->rho > 0.0 && dart->a > 0.0 && dart->b > 0.0)) {
      throw InputError("DART theta, rho, a and b must all be positive");
    }
  }
}

double LeafScale(OutcomeKind kind, double kappa) {
  if (!(kappa > 0.0)) throw InputError("kappa must be positive");
  return (kind == OutcomeKind::kProbit ? 3.0 : 0.5) / kappa;
}

double Ensemble::Evaluate(std::span<const double> x) const {
  double f = offset;
  for (const Tree& t : trees) f += t.Evaluate(x);
  return f;
}

double GrowProbability(int depth, double alpha, double gamma) {
  return alpha * std::pow(1.0 + depth, -gamma);
}

int SampleSplitVariable(const TreePrior& prior, int num_vars, Rng& rng) {
  if (prior.split_probs.empty()) return static_cast<int>(rng.UniformIndex(num_vars));
  return static_cast<int>(rng.Discrete(prior.split_probs));
}

Tree SamplePriorTree(double alpha, double gamma, int num_vars, Rng& rng) {
  Tree tree;
  std::vector<int> open{Tree::kRoot};
  while (!open.empty()) {
    const int id = open.back();
    open.pop_back();
    if (rng.Uniform() < GrowProbability(tree.node(id).depth, alpha, gamma)) {
      SplitRule rule{static_cast<int>(rng.UniformIndex(num_vars)), -1, 0.0};
      auto [l, r] = tree.Grow(id, rule, 0.0, 0.0);
      open.push_back(l);
      open.push_back(r);
    }
  }
  return tree;
}

double LeafLogIntegratedLikelihood(const NodeStats& stats, double sigma, double leaf_var) {
  const double s2 = sigma * sigma;
  const double denom = s2 + static_cast<double>(stats.n) * leaf_var;
  return 0.5 * std::log(s2 / denom) + stats.sum * stats.sum * leaf_var / (2.0 * s2 * denom);
}

double TreeLogMarginalLikelihood(const Tree& tree, std::span<const double> resid,
                                 const Matrix& x, double sigma, double leaf_var) {
  if (static_cast<Eigen::Index>(resid.size()) != x.rows()) {
    throw InputError("residual vector and covariate matrix disagree on row count");
  }
  std::vector<NodeStats> stats(tree.arena_size());
  std::vector<double> sumsq(tree.arena_size(), 0.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int leaf = tree.Route(RowSpan(x, i));
    stats[leaf].n += 1;
    stats[leaf].sum += resid[i];
    sumsq[leaf] += resid[i] * resid[i];
  }
  const double s2 = sigma * sigma;
  double out = 0.0;
  for (int leaf : tree.Leaves()) {
    const double n = static_cast<double>(stats[leaf].n);
    out += -0.5 * n * std::log(2.0 * M_PI * s2) - sumsq[leaf] / (2.0 * s2) +
           LeafLogIntegratedLikelihood(stats[leaf], sigma, leaf_var);
  }
  return out;
}

LeafPosterior LeafPosteriorMoments(std::size_t n, double sum, double sigma, double tau, int m) {
  const double s2 = sigma * sigma;
  const double precision = static_cast<double>(n) / s2 + static_cast<double>(m) / (tau * tau);
  return {(sum / s2) / precision, 1.0 / precision};
}

double LeafPosteriorDraw(std::span<const double> leaf_resid, double sigma, double tau, int m,
                         Rng& rng) {
  const double sum = std::accumulate(leaf_resid.begin(), leaf_resid.end(), 0.0);
  const LeafPosterior post = LeafPosteriorMoments(leaf_resid.size(), sum, sigma, tau, m);
  return rng.Normal(post.mean, std::sqrt(post.variance));
}

double SigmaPosteriorScale(std::span<const double> resid, double nu, double lambda) {
  double ss = 0.0;
  for (double r : resid) ss += r * r;
  return (nu * lambda + ss) / (nu + static_cast<double>(resid.size()));
}

double SigmaDraw(std::span<const double> resid, double nu, double lambda, OutcomeKind kind,
                 Rng& rng) {
  if (kind == OutcomeKind::kProbit) {
    throw ContractViolation("SigmaDraw called for a probit model; sigma is fixed at 1");
  }
  const double df = nu + static_cast<double>(resid.size());
  const double scale = SigmaPosteriorScale(resid, nu, lambda);
  return std::sqrt(df * scale / rng.ChiSquared(df));
}

SplitProbabilityDraw DartUpdateS(std::span<const int> counts, double theta, Rng& rng) {
  const double base = theta / static_cast<double>(counts.size());
  std::vector<double> shape(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) shape[j] = base + counts[j];
  SplitProbabilityDraw out;
  out.log_probs = LogDirichlet(shape, rng);
  out.probs.resize(shape.size());
  for (std::size_t j = 0; j < shape.size(); ++j) out.probs[j] = std::exp(out.log_probs[j]);
  return out;
}

double DartUpdateTheta(std::span<const double> log_s, double rho, double a, double b, Rng& rng,
                       bool use_likelihood) {
  constexpr int kGrid = 1000;
  constexpr double kLo = 0.001;
  constexpr double kHi = 0.999;
  const double p = static_cast<double>(log_s.size());
  const double sum_log = std::accumulate(log_s.begin(), log_s.end(), 0.0);
  std::vector<double> theta(kGrid);
  std::vector<double> log_post(kGrid);
  for (int g = 0; g < kGrid; ++g) {
    const double lam = kLo + (kHi - kLo) * g / (kGrid - 1);
    theta[g] = rho * lam / (1.0 - lam);
    double lp = (a - 1.0) * std::log(lam) + (b - 1.0) * std::log1p(-lam);
    if (use_likelihood) {
      lp += std::lgamma(theta[g]) - p * std::lgamma(theta[g] / p) + (theta[g] / p - 1.0) * sum_log;
    }
    log_post[g] = lp;
  }
  return theta[rng.DiscreteLog(log_post)];
}

double MoveTerms::AcceptanceProbability() const {
  if (!feasible || kind == Kind::kNone) return 0.0;
  return std::min(1.0, std::exp(LogRatio()));
}

TreeKernel::TreeKernel(const Matrix& x, const CutpointGrid& cuts, double alpha, double gamma,
                       double sigma, double leaf_var, std::span<const double> log_split_probs)
    : x_(x),
      cuts_(cuts),
      alpha_(alpha),
      gamma_(gamma),
      sigma_(sigma),
      leaf_var_(leaf_var),
      log_split_probs_(log_split_probs) {
  if (cuts_.num_vars() != x_.cols()) throw InputError("cutpoint grid does not match covariates");
}

std::vector<int> TreeKernel::AssignRows(const Tree& tree) const {
  std::vector<int> out(static_cast<std::size_t>(x_.rows()));
  for (Eigen::Index i = 0; i < x_.rows(); ++i) out[i] = tree.Route(RowSpan(x_, i));
  return out;
}

double TreeKernel::NodeGrowProbability(int depth, bool can_split) const {
  return can_split ? GrowProbability(depth, alpha_, gamma_) : 0.0;
}

std::vector<int> TreeKernel::GoodVariables(const Tree& tree, int id) const {
  std::vector<int> out;
  for (int v = 0; v < cuts_.num_vars(); ++v) {
    int lo = 0, hi = -1;
    tree.CutRange(id, v, cuts_.NumCuts(v), &lo, &hi);
    if (lo <= hi) out.push_back(v);
  }
  return out;
}

bool TreeKernel::CanSplit(const Tree& tree, int id) const {
  for (int v = 0; v < cuts_.num_vars(); ++v) {
    int lo = 0, hi = -1;
    tree.CutRange(id, v, cuts_.NumCuts(v), &lo, &hi);
    if (lo <= hi) return true;
  }
  return false;
}

std::vector<int> TreeKernel::GoodLeaves(const Tree& tree) const {
  std::vector<int> out;
  for (int leaf : tree.Leaves()) {
    if (CanSplit(tree, leaf)) out.push_back(leaf);
  }
  return out;
}

double TreeKernel::LogVariableWeight(int v) const {
  return log_split_probs_.empty() ? 0.0 : log_split_probs_[v];
}

double TreeKernel::DrawLeafValue(const NodeStats& s, Rng& rng) const {
  const double s2 = sigma_ * sigma_;
  const double precision = static_cast<double>(s.n) / s2 + 1.0 / leaf_var_;
  return rng.Normal((s.sum / s2) / precision, std::sqrt(1.0 / precision));
}

MoveTerms TreeKernel::EvaluateGrow(const Tree& tree, std::span<const int> node_of_row,
                                   std::span<const double> resid, int leaf,
                                   const SplitRule& rule) const {
  MoveTerms t;
  t.kind = MoveTerms::Kind::kGrow;
  t.node = leaf;
  t.rule = rule;
  const auto p = static_cast<std::size_t>(x_.cols());
  const double* data = x_.data();
  for (std::size_t i = 0; i < node_of_row.size(); ++i) {
    if (node_of_row[i] != leaf) continue;
    NodeStats& side = data[i * p + rule.variable] < rule.cutpoint ? t.left : t.right;
    side.n += 1;
    side.sum += resid[i];
  }
  t.feasible = t.left.n > 0 && t.right.n > 0;

  // Whether each proposed child keeps any available cutpoint.
  bool left_can = false;
  bool right_can = false;
  for (int v = 0; v < cuts_.num_vars() && !(left_can && right_can); ++v) {
    int lo = 0, hi = -1;
    tree.CutRange(leaf, v, cuts_.NumCuts(v), &lo, &hi);
    if (v == rule.variable) {
      left_can = left_can || lo <= std::min(hi, rule.cut_index - 1);
      right_can = right_can || std::max(lo, rule.cut_index + 1) <= hi;
    } else if (lo <= hi) {
      left_can = right_can = true;
    }
  }

  const int depth = tree.node(leaf).depth;
  const double pg = NodeGrowProbability(depth, true);
  const double pgl = NodeGrowProbability(depth + 1, left_can);
  const double pgr = NodeGrowProbability(depth + 1, right_can);
  t.log_prior_ratio = std::log(pg) + std::log1p(-pgl) + std::log1p(-pgr) - std::log1p(-pg);

  const auto good = GoodLeaves(tree);
  const bool root_only = tree.IsLeaf(Tree::kRoot);
  const double birth_prob = root_only ? 1.0 : 0.5;
  const int parent = tree.node(leaf).parent;
  const auto nogs_after = tree.Nogs().size() + 1 - (parent >= 0 && tree.IsNog(parent) ? 1 : 0);
  const auto good_after = good.size() - 1 + (left_can ? 1 : 0) + (right_can ? 1 : 0);
  const double death_prob_after = good_after > 0 ? 0.5 : 1.0;
  t.log_proposal_ratio = std::log(death_prob_after) - std::log(static_cast<double>(nogs_after)) -
                         std::log(birth_prob) + std::log(static_cast<double>(good.size()));

  if (t.feasible) {
    const NodeStats merged{t.left.n + t.right.n, t.left.sum + t.right.sum};
    t.log_likelihood_ratio = LeafLogIntegratedLikelihood(t.left, sigma_, leaf_var_) +
                             LeafLogIntegratedLikelihood(t.right, sigma_, leaf_var_) -
                             LeafLogIntegratedLikelihood(merged, sigma_, leaf_var_);
  }
  return t;
}

MoveTerms TreeKernel::EvaluatePrune(const Tree& tree, std::span<const int> node_of_row,
                                    std::span<const double> resid, int nog) const {
  MoveTerms t;
  t.kind = MoveTerms::Kind::kPrune;
  t.node = nog;
  t.rule = tree.node(nog).rule;
  const int l = tree.node(nog).left;
  const int r = tree.node(nog).right;
  for (std::size_t i = 0; i < node_of_row.size(); ++i) {
    if (node_of_row[i] == l) {
      t.left.n += 1;
      t.left.sum += resid[i];
    } else if (node_of_row[i] == r) {
      t.right.n += 1;
      t.right.sum += resid[i];
    }
  }
  t.feasible = true;

  const bool left_can = CanSplit(tree, l);
  const bool right_can = CanSplit(tree, r);
  const int depth = tree.node(nog).depth;
  const double pg = NodeGrowProbability(depth, true);
  const double pgl = NodeGrowProbability(depth + 1, left_can);
  const double pgr = NodeGrowProbability(depth + 1, right_can);
  t.log_prior_ratio = std::log1p(-pg) - std::log(pg) - std::log1p(-pgl) - std::log1p(-pgr);

  const auto good = GoodLeaves(tree);
  const double birth_prob_after = nog == Tree::kRoot ? 1.0 : 0.5;
  const auto good_after = good.size() + 1 - (left_can ? 1 : 0) - (right_can ? 1 : 0);
  const double death_prob = good.empty() ? 1.0 : 0.5;
  const auto nogs = tree.Nogs().size();
  t.log_proposal_ratio = std::log(birth_prob_after) - std::log(static_cast<double>(good_after)) -
                         std::log(death_prob) + std::log(static_cast<double>(nogs));

  const NodeStats merged{t.left.n + t.right.n, t.left.sum + t.right.sum};
  t.log_likelihood_ratio = LeafLogIntegratedLikelihood(merged, sigma_, leaf_var_) -
                           LeafLogIntegratedLikelihood(t.left, sigma_, leaf_var_) -
                           LeafLogIntegratedLikelihood(t.right, sigma_, leaf_var_);
  return t;
}

MoveTerms TreeKernel::Step(Tree& tree, std::vector<int>& node_of_row,
                           std::span<const double> resid, Rng& rng) const {
  const auto good = GoodLeaves(tree);
  const bool root_only = tree.IsLeaf(Tree::kRoot);
  const double birth_prob = good.empty() ? 0.0 : (root_only ? 1.0 : 0.5);
  if (root_only && good.empty()) return {};

  MoveTerms move;
  if (rng.Uniform() < birth_prob) {
    const int leaf = good[rng.UniformIndex(good.size())];
    const auto vars = GoodVariables(tree, leaf);
    std::vector<double> logw(vars.size());
    for (std::size_t k = 0; k < vars.size(); ++k) logw[k] = LogVariableWeight(vars[k]);
    const int v = vars[rng.DiscreteLog(logw)];
    int lo = 0, hi = -1;
    tree.CutRange(leaf, v, cuts_.NumCuts(v), &lo, &hi);
    const int c = lo + static_cast<int>(rng.UniformIndex(static_cast<std::size_t>(hi - lo + 1)));
    move = EvaluateGrow(tree, node_of_row, resid, leaf, SplitRule{v, c, cuts_.Cut(v, c)});
  } else {
    const auto nogs = tree.Nogs();
    move = EvaluatePrune(tree, node_of_row, resid, nogs[rng.UniformIndex(nogs.size())]);
  }

  const double u = rng.Uniform();
  if (!move.feasible || std::log(u) >= move.LogRatio()) return move;

  if (move.kind == MoveTerms::Kind::kGrow) {
    const double mu_l = DrawLeafValue(move.left, rng);
    const double mu_r = DrawLeafValue(move.right, rng);
    const auto [l, r] = tree.Grow(move.node, move.rule, mu_l, mu_r);
    const auto p = static_cast<std::size_t>(x_.cols());
    const double* data = x_.data();
    for (std::size_t i = 0; i < node_of_row.size(); ++i) {
      if (node_of_row[i] != move.node) continue;
      node_of_row[i] = data[i * p + move.rule.variable] < move.rule.cutpoint ? l : r;
    }
  } else {
    const int l = tree.node(move.node).left;
    const int r = tree.node(move.node).right;
    const NodeStats merged{move.left.n + move.right.n, move.left.sum + move.right.sum};
    tree.Prune(move.node, DrawLeafValue(merged, rng));
    for (int& id : node_of_row) {
      if (id == l || id == r) id = move.node;
    }
  }
  return move;
}

void TreeKernel::DrawLeaves(Tree& tree, std::span<const int> node_of_row,
                            std::span<const double> resid, Rng& rng) const {
  std::vector<NodeStats> stats(tree.arena_size());
  for (std::size_t i = 0; i < node_of_row.size(); ++i) {
    stats[node_of_row[i]].n += 1;
    stats[node_of_row[i]].sum += resid[i];
  }
  for (int leaf : tree.Leaves()) tree.SetLeaf(leaf, DrawLeafValue(stats[leaf], rng));
}

Tree ProposeAndAccept(const Tree& tree, std::span<const double> resid, const Matrix& x,
                      const CutpointGrid& cuts, const TreePrior& prior, double sigma, double tau,
                      int m, Rng& rng) {
  if (static_cast<Eigen::Index>(resid.size()) != x.rows()) {
    throw InputError("residual vector and covariate matrix disagree on row count");
  }
  std::vector<double> log_probs;
  for (double s : prior.split_probs) log_probs.push_back(std::log(s));
  const TreeKernel kernel(x, cuts, prior.alpha, prior.gamma, sigma, tau * tau / m, log_probs);
  Tree out = tree;
  auto rows = kernel.AssignRows(out);
  kernel.Step(out, rows, resid, rng);
  return out;
}

SumOfTreesChain::SumOfTreesChain(const Matrix& x, const TreePrior& prior, int num_trees,
                                 double leaf_scale)
    : x_(x),
      cuts_(x),
      prior_(prior),
      leaf_var_(leaf_scale * leaf_scale / num_trees),
      trees_(static_cast<std::size_t>(num_trees)),
      node_of_row_(static_cast<std::size_t>(num_trees),
                   std::vector<int>(static_cast<std::size_t>(x.rows()), Tree::kRoot)),
      fit_(static_cast<std::size_t>(x.rows()), 0.0),
      resid_(static_cast<std::size_t>(x.rows()), 0.0) {
  if (num_trees < 1) throw InputError("ensemble needs at least one tree");
  prior_.Validate(static_cast<int>(x.cols()));
  if (!prior_.split_probs.empty()) {
    for (double s : prior_.split_probs) log_split_probs_.push_back(std::log(s));
  } else if (prior_.dart) {
    log_split_probs_.assign(static_cast<std::size_t>(x.cols()),
                            -std::log(static_cast<double>(x.cols())));
  }
  if (prior_.dart) theta_ = prior_.dart->theta;
}

void SumOfTreesChain::Sweep(std::span<const double> target, double sigma, Rng& rng) {
  const TreeKernel kernel(x_, cuts_, prior_.alpha, prior_.gamma, sigma, leaf_var_,
                          log_split_probs_);
  const std::size_t n = fit_.size();
  for (std::size_t j = 0; j < trees_.size(); ++j) {
    Tree& tree = trees_[j];
    auto& rows = node_of_row_[j];
    for (std::size_t i = 0; i < n; ++i) {
      fit_[i] -= tree.node(rows[i]).leaf;
      resid_[i] = target[i] - fit_[i];
    }
    kernel.Step(tree, rows, resid_, rng);
    kernel.DrawLeaves(tree, rows, resid_, rng);
    for (std::size_t i = 0; i < n; ++i) fit_[i] += tree.node(rows[i]).leaf;
  }
}

void SumOfTreesChain::UpdateDart(Rng& rng) {
  if (!prior_.dart) return;
  const auto counts = SplitCounts();
  auto draw = DartUpdateS(counts, theta_, rng);
  log_split_probs_ = std::move(draw.log_probs);
  if (prior_.dart->theta_random) {
    theta_ = DartUpdateTheta(log_split_probs_, prior_.dart->rho, prior_.dart->a, prior_.dart->b,
                             rng);
  }
}

FrozenEnsemble SumOfTreesChain::Freeze() const {
  FrozenEnsemble out;
  out.trees.reserve(trees_.size());
  for (const Tree& t : trees_) out.trees.emplace_back(t);
  return out;
}

std::vector<int> SumOfTreesChain::SplitCounts() const {
  std::vector<int> counts(static_cast<std::size_t>(x_.cols()), 0);
  for (const Tree& t : trees_) t.AccumulateSplitCounts(counts);
  return counts;
}

std::vector<double> SumOfTreesChain::SplitProbs() const {
  std::vector<double> out(log_split_probs_.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::exp(log_split_probs_[j]);
  return out;
}

}  // namespace crbart

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

#ifndef CRBART_SAMPLER_H_
#define CRBART_SAMPLER_H_

#include <optional>
#include <span>
#include <vector>

#include "crbart/common.h"
#include "crbart/cutpoints.h"
#include "crbart/random.h"
#include "crbart/tree.h"

namespace crbart {

// Sparse Dirichlet prior on split-variable probabilities:
// s ~ Dirichlet(theta/P, ..., theta/P), theta/(theta + rho) ~ Beta(a, b).
struct DartSettings {
  double theta = 1.0;
  double rho = 1.0;
  double a = 0.5;
  double b = 1.0;
  bool theta_random = true;
};

struct TreePrior {
  double alpha = 0.95;
  double gamma = 2.0;
  double nu = 3.0;
  double lambda = 1.0;
  // Empty means uniform over variables; otherwise one probability per
  // variable.
  std::vector<double> split_probs;
  std::optional<DartSettings> dart;

  void Validate(int num_vars) const;
};

enum class OutcomeKind { kContinuous, kProbit };

// Leaf prior scale tau: 0.5/kappa for continuous outcomes, 3/kappa for probit.
double LeafScale(OutcomeKind kind, double kappa);

// Sum-of-trees state: f(x) = offset + sum_j g(x; T_j, M_j).
struct Ensemble {
  std::vector<Tree> trees;
  double offset = 0.0;
  double leaf_scale = 1.0;    // tau
  double residual_sd = 1.0;   // sigma, fixed at 1 for probit

  double Evaluate(std::span<const double> x) const;
};

// Prior probability that a node at `depth` is a branch: alpha (1 + depth)^-gamma.
double GrowProbability(int depth, double alpha, double gamma);

// Draws a split variable from the prior (uniform, or the split_probs vector).
int SampleSplitVariable(const TreePrior& prior, int num_vars, Rng& rng);

// Tree drawn from the structural prior alone (no data, unbounded cutpoints).
Tree SamplePriorTree(double alpha, double gamma, int num_vars, Rng& rng);

struct NodeStats {
  std::size_t n = 0;
  double sum = 0.0;
};

// Terms of log p(r | leaf) that depend on the partition, with the leaf value
// integrated out against N(0, leaf_var) and N(., sigma^2) noise.
double LeafLogIntegratedLikelihood(const NodeStats& stats, double sigma, double leaf_var);

// Complete log marginal likelihood of residuals under a fixed tree structure,
// all leaf values integrated out.
double TreeLogMarginalLikelihood(const Tree& tree, std::span<const double> resid,
                                 const Matrix& x, double sigma, double leaf_var);

struct LeafPosterior {
  double mean = 0.0;
  double variance = 0.0;
};

// Conjugate normal update with prior N(0, tau^2/m).
LeafPosterior LeafPosteriorMoments(std::size_t n, double sum, double sigma, double tau, int m);
double LeafPosteriorDraw(std::span<const double> leaf_resid, double sigma, double tau, int m,
                         Rng& rng);

// Scale of the scaled-inverse-chi-square posterior of sigma^2:
// (nu*lambda + sum r^2) / (nu + N).
double SigmaPosteriorScale(std::span<const double> resid, double nu, double lambda);
// Draws sigma. Probit chains fix sigma = 1, so kProbit is a contract violation.
double SigmaDraw(std::span<const double> resid, double nu, double lambda, OutcomeKind kind,
                 Rng& rng);

struct SplitProbabilityDraw {
  std::vector<double> probs;
  std::vector<double> log_probs;
};

// s ~ Dirichlet(theta/P + counts_1, ..., theta/P + counts_P).
SplitProbabilityDraw DartUpdateS(std::span<const int> counts, double theta, Rng& rng);

// One draw of theta given log s on a 1000-point grid of theta/(theta + rho)
// over [0.001, 0.999]. With `use_likelihood` false the draw is from the Beta
// prior alone.
double DartUpdateTheta(std::span<const double> log_s, double rho, double a, double b, Rng& rng,
                       bool use_likelihood = true);

// Metropolis-Hastings ingredients of one GROW or PRUNE proposal.
struct MoveTerms {
  enum class Kind { kNone, kGrow, kPrune };
  Kind kind = Kind::kNone;
  int node = -1;
  SplitRule rule;
  bool feasible = false;  // false when a child would receive no data rows
  double log_prior_ratio = 0.0;
  double log_proposal_ratio = 0.0;
  double log_likelihood_ratio = 0.0;
  NodeStats left, right;

  double LogRatio() const { return log_prior_ratio + log_proposal_ratio + log_likelihood_ratio; }
  double AcceptanceProbability() const;
};

// GROW/PRUNE transition kernel for one tree with leaf values integrated out.
// Data rows are tracked by the id of the leaf they fall in.
class TreeKernel {
 public:
  TreeKernel(const Matrix& x, const CutpointGrid& cuts, double alpha, double gamma,
             double sigma, double leaf_var, std::span<const double> log_split_probs = {});

  std::vector<int> AssignRows(const Tree& tree) const;

  MoveTerms EvaluateGrow(const Tree& tree, std::span<const int> node_of_row,
                         std::span<const double> resid, int leaf, const SplitRule& rule) const;
  MoveTerms EvaluatePrune(const Tree& tree, std::span<const int> node_of_row,
                          std::span<const double> resid, int nog) const;

  // One MH step. On acceptance the tree and row assignment are updated and
  // the new leaves get posterior draws. Returns the evaluated move.
  MoveTerms Step(Tree& tree, std::vector<int>& node_of_row, std::span<const double> resid,
                 Rng& rng) const;

  // Gibbs draw of every leaf value given the residuals.
  void DrawLeaves(Tree& tree, std::span<const int> node_of_row, std::span<const double> resid,
                  Rng& rng) const;

  bool CanSplit(const Tree& tree, int id) const;
  std::vector<int> GoodLeaves(const Tree& tree) const;

 private:
  double NodeGrowProbability(int depth, bool can_split) const;
  std::vector<int> GoodVariables(const Tree& tree, int id) const;
  double LogVariableWeight(int v) const;
  double DrawLeafValue(const NodeStats& s, Rng& rng) const;

  const Matrix& x_;
  const CutpointGrid& cuts_;
  double alpha_;
  double gamma_;
  double sigma_;
  double leaf_var_;
  std::span<const double> log_split_probs_;
};

// Single tree, one transition: build the row assignment, run one GROW/PRUNE
// step, and return the resulting tree.
Tree ProposeAndAccept(const Tree& tree, std::span<const double> resid, const Matrix& x,
                      const CutpointGrid& cuts, const TreePrior& prior, double sigma, double tau,
                      int m, Rng& rng);

// Backfitting state for one chain: m trees, their row assignments, the
// running fit, and the DART split probabilities.
class SumOfTreesChain {
 public:
  SumOfTreesChain(const Matrix& x, const TreePrior& prior, int num_trees, double leaf_scale);

  // One pass over every tree against `target` (outcome minus offset).
  void Sweep(std::span<const double> target, double sigma, Rng& rng);
  // Dirichlet update of s, then theta when it is random.
  void UpdateDart(Rng& rng);

  std::span<const double> fit() const { return fit_; }
  const std::vector<Tree>& trees() const { return trees_; }
  FrozenEnsemble Freeze() const;
  std::vector<int> SplitCounts() const;
  std::vector<double> SplitProbs() const;
  double theta() const { return theta_; }
  const CutpointGrid& cuts() const { return cuts_; }

 private:
  const Matrix& x_;
  CutpointGrid cuts_;
  TreePrior prior_;
  double leaf_var_;
  std::vector<Tree> trees_;
  std::vector<std::vector<int>> node_of_row_;
  std::vector<double> fit_;
  std::vector<double> resid_;
  std::vector<double> log_split_probs_;
  double theta_ = 1.0;
};

}  // namespace crbart

#endif  // CRBART_SAMPLER_H_

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

#ifndef CRBART_TREE_H_
#define CRBART_TREE_H_

#include <cstdint>
#include <span>
#include <vector>

namespace crbart {

// Axis-aligned branch rule: x[variable] < cutpoint goes left.
// `cut_index` addresses the training cutpoint grid and is -1 for trees that
// were built by hand or loaded from disk.
struct SplitRule {
  int variable = -1;
  int cut_index = -1;
  double cutpoint = 0.0;
};

// Mutable binary tree used by the sampler. Nodes live in an arena; ids of
// pruned nodes are recycled.
class Tree {
 public:
  static constexpr int kRoot = 0;

  struct Node {
    SplitRule rule;
    double leaf = 0.0;
    int parent = -1;
    int left = -1;
    int right = -1;
    int depth = 0;
    bool in_use = true;
  };

  explicit Tree(double root_value = 0.0);

  bool IsLeaf(int id) const { return nodes_[id].left < 0; }
  // Branch whose two children are both leaves.
  bool IsNog(int id) const;
  const Node& node(int id) const { return nodes_[id]; }
  std::size_t arena_size() const { return nodes_.size(); }

  // Id of the leaf whose region contains x. Throws InputError when x is too
  // short for a rule on the path.
  int Route(std::span<const double> x) const;
  double Evaluate(std::span<const double> x) const { return nodes_[Route(x)].leaf; }

  // Turns `leaf` into a branch; returns {left, right} child ids.
  std::pair<int, int> Grow(int leaf, const SplitRule& rule, double left_value, double right_value);
  // Collapses branch `nog` (both children leaves) into a leaf.
  void Prune(int nog, double value);
  void SetLeaf(int id, double value) { nodes_[id].leaf = value; }

  std::vector<int> Leaves() const;
  std::vector<int> Nogs() const;
  int NumLeaves() const;
  int NumBranches() const { return NumLeaves() - 1; }
  int MaxDepth() const;
  // Largest variable index used by a branch, or -1 for a root-only tree.
  int MaxVariable() const;

  // Range [lo, hi] of cut indices of `variable` still available inside the
  // region of node `id`, given `num_cuts` grid cutpoints. Empty when lo > hi.
  void CutRange(int id, int variable, int num_cuts, int* lo, int* hi) const;

  // Adds per-variable branch counts of this tree to `counts`.
  void AccumulateSplitCounts(std::span<int> counts) const;

 private:
  int Allocate();

  std::vector<Node> nodes_;
  std::vector<int> free_;
};

// Compact immutable tree for stored posterior draws: preorder layout where a
// branch's left child follows it and `right` holds the right child's index.
class FrozenTree {
 public:
  struct Node {
    std::int32_t variable = -1;  // -1 marks a leaf
    std::int32_t right = -1;
    double value = 0.0;          // cutpoint for branches, leaf value for leaves
  };

  FrozenTree() : nodes_{Node{}} {}
  explicit FrozenTree(const Tree& tree);
  explicit FrozenTree(std::vector<Node> nodes);

  double Evaluate(std::span<const double> x) const;
  std::span<const Node> nodes() const { return nodes_; }
  int MaxVariable() const;

 private:
  std::vector<Node> nodes_;
};

// Sum of frozen trees; the offset lives with the owning fit.
struct FrozenEnsemble {
  std::vector<FrozenTree> trees;
  double Sum(std::span<const double> x) const;
};

}  // namespace crbart

#endif  // CRBART_TREE_H_

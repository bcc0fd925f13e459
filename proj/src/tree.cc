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

#include "crbart/tree.h"

#include <algorithm>
#include <functional>
#include <string>

#include "crbart/common.h"

namespace crbart {

namespace {

[[noreturn]] void ThrowShortInput(int variable, std::size_t size) {
  throw InputError("covariate vector of length " + std::to_string(size) +
                   " has no entry for split variable " + std::to_string(variable));
}

}  // namespace

Tree::Tree(double root_value) {
  nodes_.emplace_back();
  nodes_[kRoot].leaf = root_value;
}

bool Tree::IsNog(int id) const {
  const Node& n = nodes_[id];
  return n.left >= 0 && IsLeaf(n.left) && IsLeaf(n.right);
}

int Tree::Route(std::span<const double> x) const {
  int id = kRoot;
  while (nodes_[id].left >= 0) {
    const SplitRule& r = nodes_[id].rule;
    if (static_cast<std::size_t>(r.variable) >= x.size()) ThrowShortInput(r.variable, x.size());
    id = x[r.variable] < r.cutpoint ? nodes_[id].left : nodes_[id].right;
  }
  return id;
}

int Tree::Allocate() {
  if (!free_.empty()) {
    const int id = free_.back();
    free_.pop_back();
    nodes_[id] = Node{};
    return id;
  }
  nodes_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

std::pair<int, int> Tree::Grow(int leaf, const SplitRule& rule, double left_value,
                               double right_value) {
  if (!IsLeaf(leaf)) throw ContractViolation("Grow called on a branch");
  const int l = Allocate();
  const int r = Allocate();
  for (int c : {l, r}) {
    nodes_[c].parent = leaf;
    nodes_[c].depth = nodes_[leaf].depth + 1;
  }
  nodes_[l].leaf = left_value;
  nodes_[r].leaf = right_value;
  nodes_[leaf].rule = rule;
  nodes_[leaf].left = l;
  nodes_[leaf].right = r;
  nodes_[leaf].leaf = 0.0;
  return {l, r};
}

void Tree::Prune(int nog, double value) {
  if (!IsNog(nog)) throw ContractViolation("Prune called on a node that is not a nog");
  Node& n = nodes_[nog];
  for (int c : {n.left, n.right}) {
    nodes_[c].in_use = false;
    free_.push_back(c);
  }
  n.left = n.right = -1;
  n.rule = SplitRule{};
  n.leaf = value;
}

std::vector<int> Tree::Leaves() const {
  std::vector<int> out;
  std::vector<int> stack{kRoot};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (IsLeaf(id)) {
      out.push_back(id);
    } else {
      stack.push_back(nodes_[id].right);
      stack.push_back(nodes_[id].left);
    }
  }
  return out;
}

std::vector<int> Tree::Nogs() const {
  std::vector<int> out;
  std::vector<int> stack{kRoot};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (IsLeaf(id)) continue;
    if (IsNog(id)) out.push_back(id);
    stack.push_back(nodes_[id].right);
    stack.push_back(nodes_[id].left);
  }
  return out;
}

int Tree::NumLeaves() const { return static_cast<int>(Leaves().size()); }

int Tree::MaxDepth() const {
  int depth = 0;
  for (int id : Leaves()) depth = std::max(depth, nodes_[id].depth);
  return depth;
}

int Tree::MaxVariable() const {
  int v = -1;
  for (const Node& n : nodes_) {
    if (n.in_use && n.left >= 0) v = std::max(v, n.rule.variable);
  }
  return v;
}

void Tree::CutRange(int id, int variable, int num_cuts, int* lo, int* hi) const {
  *lo = 0;
  *hi = num_cuts - 1;
  int child = id;
  int parent = nodes_[id].parent;
  while (parent >= 0) {
    const Node& p = nodes_[parent];
    if (p.rule.variable == variable) {
      if (child == p.left) {
        *hi = std::min(*hi, p.rule.cut_index - 1);
      } else {
        *lo = std::max(*lo, p.rule.cut_index + 1);
      }
    }
    child = parent;
    parent = p.parent;
  }
}

void Tree::AccumulateSplitCounts(std::span<int> counts) const {
  for (const Node& n : nodes_) {
    if (n.in_use && n.left >= 0) ++counts[n.rule.variable];
  }
}

FrozenTree::FrozenTree(const Tree& tree) {
  std::function<void(int)> emit = [&](int id) {
    const auto& n = tree.node(id);
    const auto self = nodes_.size();
    if (tree.IsLeaf(id)) {
      nodes_.push_back(Node{-1, -1, n.leaf});
      return;
    }
    nodes_.push_back(Node{n.rule.variable, -1, n.rule.cutpoint});
    emit(n.left);
    nodes_[self].right = static_cast<std::int32_t>(nodes_.size());
    emit(n.right);
  };
  emit(Tree::kRoot);
}

FrozenTree::FrozenTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw InputError("frozen tree needs at least one node");
  // Every branch must point forward to a valid right child; a well-formed
  // preorder layout has exactly one more leaf than branches.
  std::size_t leaves = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.variable < 0) {
      ++leaves;
      continue;
    }
    if (n.right <= static_cast<std::int32_t>(i + 1) ||
        n.right >= static_cast<std::int32_t>(nodes_.size())) {
      throw InputError("frozen tree has a malformed branch");
    }
  }
  if (2 * leaves != nodes_.size() + 1) throw InputError("frozen tree leaf count mismatch");
}

double FrozenTree::Evaluate(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes_[i].variable >= 0) {
    const Node& n = nodes_[i];
    if (static_cast<std::size_t>(n.variable) >= x.size()) ThrowShortInput(n.variable, x.size());
    i = x[n.variable] < n.value ? i + 1 : static_cast<std::size_t>(n.right);
  }
  return nodes_[i].value;
}

int FrozenTree::MaxVariable() const {
  int v = -1;
  for (const Node& n : nodes_) v = std::max(v, static_cast<int>(n.variable));
  return v;
}

double FrozenEnsemble::Sum(std::span<const double> x) const {
  double s = 0.0;
  for (const FrozenTree& t : trees) s += t.Evaluate(x);
  return s;
}

}  // namespace crbart

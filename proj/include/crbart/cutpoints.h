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

#ifndef CRBART_CUTPOINTS_H_
#define CRBART_CUTPOINTS_H_

#include <vector>

#include "crbart/common.h"

namespace crbart {

// Per-variable candidate cutpoints, fixed once from the training matrix.
// Columns with at most `max_cuts + 1` distinct values get the midpoints
// between consecutive distinct values (a 0/1 column gets the single cutpoint
// 0.5); wider columns get `max_cuts` quantile-based midpoints.
class CutpointGrid {
 public:
  static constexpr int kDefaultMaxCuts = 100;

  CutpointGrid() = default;
  explicit CutpointGrid(const Matrix& x, int max_cuts = kDefaultMaxCuts);

  int num_vars() const { return static_cast<int>(cuts_.size()); }
  int NumCuts(int variable) const { return static_cast<int>(cuts_[variable].size()); }
  double Cut(int variable, int index) const { return cuts_[variable][index]; }
  const std::vector<double>& cuts(int variable) const { return cuts_[variable]; }

 private:
  std::vector<std::vector<double>> cuts_;
};

}  // namespace crbart

#endif  // CRBART_CUTPOINTS_H_

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

#include "crbart/cutpoints.h"

#include <algorithm>

namespace crbart {

CutpointGrid::CutpointGrid(const Matrix& x, int max_cuts) {
  if (max_cuts < 1) throw InputError("cutpoint grid needs max_cuts >= 1");
  cuts_.resize(static_cast<std::size_t>(x.cols()));
  std::vector<double> column(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index v = 0; v < x.cols(); ++v) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) column[i] = x(i, v);
    std::sort(column.begin(), column.end());
    std::vector<double> distinct = column;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    auto& out = cuts_[v];
    if (distinct.size() <= static_cast<std::size_t>(max_cuts) + 1) {
      for (std::size_t k = 1; k < distinct.size(); ++k) {
        out.push_back(0.5 * (distinct[k - 1] + distinct[k]));
      }
      continue;
    }
    const auto n = column.size();
    for (int c = 1; c <= max_cuts; ++c) {
      auto idx = static_cast<std::size_t>(static_cast<double>(c) * static_cast<double>(n) /
                                          static_cast<double>(max_cuts + 1));
      idx = std::clamp<std::size_t>(idx, 1, n - 1);
      // Step to the next value change so the cut separates observed points.
      auto hi = std::upper_bound(column.begin(), column.end(), column[idx - 1]);
      if (hi == column.end()) continue;
      const double cut = 0.5 * (column[idx - 1] + *hi);
      if (out.empty() || cut > out.back()) out.push_back(cut);
    }
  }
}

}  // namespace crbart

// Copyright 2026 The aw2v Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aw2v/baselines.hpp"

#include <algorithm>
#include <limits>

#include "aw2v/errors.hpp"

namespace aw2v {

NaiveEmbedding naive_encode(const FeatureSequence& x, int segments) {
  if (segments < 1) throw DimensionError("segment count must be >= 1");
  const Index length = x.length();
  const Index dim = x.dim();
  NaiveEmbedding out{Vector::Zero(dim * segments), segments};
  for (Index s = 0; s < segments; ++s) {
    const Index begin = s * length / segments;
    const Index end = (s + 1) * length / segments;
    if (end == begin) continue;
    out.values.segment(s * dim, dim) =
        x.frames().middleRows(begin, end - begin).colwise().mean().transpose();
  }
  return out;
}

namespace {

enum class Step : unsigned char { kStart, kDiagonal, kUp, kLeft };

void check_pair(const FeatureSequence& a, const FeatureSequence& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("DTW inputs differ in dimension (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

DtwAlignment dtw_align(const FeatureSequence& a, const FeatureSequence& b) {
  check_pair(a, b);
  const Index rows = a.length();
  const Index cols = b.length();
  Matrix cost(rows, cols);
  std::vector<Step> from(static_cast<std::size_t>(rows * cols));
  auto at = [cols](Index i, Index j) { return static_cast<std::size_t>(i * cols + j); };

  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const double local = (a.frames().row(i) - b.frames().row(j)).norm();
      if (i == 0 && j == 0) {
        cost(i, j) = local;
        from[at(i, j)] = Step::kStart;
        continue;
      }
      // Ties prefer the diagonal, then the vertical step.
      double best = std::numeric_limits<double>::infinity();
      Step step = Step::kStart;
      if (i > 0 && j > 0 && cost(i - 1, j - 1) < best) {
        best = cost(i - 1, j - 1);
        step = Step::kDiagonal;
      }
      if (i > 0 && cost(i - 1, j) < best) {
        best = cost(i - 1, j);
        step = Step::kUp;
      }
      if (j > 0 && cost(i, j - 1) < best) {
        best = cost(i, j - 1);
        step = Step::kLeft;
      }
      cost(i, j) = best + local;
      from[at(i, j)] = step;
    }
  }

  DtwAlignment out;
  out.distance = cost(rows - 1, cols - 1);
  Index i = rows - 1;
  Index j = cols - 1;
  while (true) {
    out.path.emplace_back(i, j);
    const Step step = from[at(i, j)];
    if (step == Step::kStart) break;
    if (step != Step::kLeft) --i;
    if (step != Step::kUp) --j;
  }
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

double dtw_distance(const FeatureSequence& a, const FeatureSequence& b,
                    const DtwOptions& options) {
  if (!options.normalize_by_path_length) {
    check_pair(a, b);
    // Two-row DP; same recurrence and summation order as dtw_align.
    const Index rows = a.length();
    const Index cols = b.length();
    Vector prev(cols), curr(cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        const double local = (a.frames().row(i) - b.frames().row(j)).norm();
        if (i == 0 && j == 0) {
          curr[j] = local;
          continue;
        }
        double best = std::numeric_limits<double>::infinity();
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, curr[j - 1]);
        curr[j] = best + local;
      }
      std::swap(prev, curr);
    }
    return prev[cols - 1];
  }
  const DtwAlignment alignment = dtw_align(a, b);
  return alignment.distance / static_cast<double>(alignment.path.size());
}

}  // namespace aw2v

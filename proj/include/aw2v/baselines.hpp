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

#ifndef AW2V_BASELINES_HPP_
#define AW2V_BASELINES_HPP_

#include <utility>
#include <vector>

#include "aw2v/data.hpp"
#include "aw2v/types.hpp"

namespace aw2v {

struct NaiveEmbedding {
  Vector values;  // D * m
  int segments = 0;
};

// Splits x into m runs [floor(iT/m), floor((i+1)T/m)), averages each, and
// concatenates the averages. A run with no frames (T < m) yields zeros.
NaiveEmbedding naive_encode(const FeatureSequence& x, int segments);

struct DtwOptions {
  // Divide the accumulated cost by the number of cells on the best path.
  bool normalize_by_path_length = false;
};

struct DtwAlignment {
  double distance = 0.0;  // unnormalized
  std::vector<std::pair<Index, Index>> path;  // (0,0) .. (Ta-1, Tb-1)
};

// Full DTW with steps (i-1,j), (i,j-1), (i-1,j-1), unit weights, no band, and
// Euclidean frame distance.
DtwAlignment dtw_align(const FeatureSequence& a, const FeatureSequence& b);
double dtw_distance(const FeatureSequence& a, const FeatureSequence& b,
                    const DtwOptions& options = {});

}  // namespace aw2v

#endif  // AW2V_BASELINES_HPP_

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

#ifndef AW2V_SERIAL_HPP_
#define AW2V_SERIAL_HPP_

// Single-threaded reference versions of the OpenMP kernels. They fix the
// arithmetic order the parallel versions must reproduce bit for bit and serve
// as the baseline in bench/.

#include "aw2v/eval.hpp"
#include "aw2v/retrieval.hpp"

namespace aw2v::serial {

EmbeddingArchive build_archive(const SegmentEncoder& encoder, const Dataset& dataset);

RankedResult rank(const Vector& query, const EmbeddingArchive& archive,
                  const RankOptions& options = {});

RankedResult rank_dtw(const FeatureSequence& query, const Dataset& dataset,
                      const RankOptions& options = {}, const DtwOptions& dtw = {});

SimilarityTable similarity_table(const EmbeddingArchive& archive, const Dataset& dataset,
                                 std::size_t open_bucket = 5);

MapReport mean_average_precision(const EmbeddingArchive& archive);
MapReport mean_average_precision_dtw(const Dataset& dataset, const DtwOptions& dtw = {});

}  // namespace aw2v::serial

#endif  // AW2V_SERIAL_HPP_

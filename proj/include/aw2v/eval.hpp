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

#ifndef AW2V_EVAL_HPP_
#define AW2V_EVAL_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aw2v/baselines.hpp"
#include "aw2v/data.hpp"
#include "aw2v/retrieval.hpp"
#include "aw2v/types.hpp"

namespace aw2v {

// Levenshtein distance with unit costs over phoneme symbols.
std::size_t phoneme_edit_distance(std::span<const std::string> p,
                                  std::span<const std::string> q);

struct SimilarityBucket {
  std::string label;  // "0", "1", ... or "<open>+"
  std::size_t pair_count = 0;
  double mean_cosine = 0.0;  // NaN when pair_count == 0
};

// Buckets 0..open_bucket-1 are exact distances; the last collects
// distances >= open_bucket. open_bucket = 5 gives 0,1,2,3,4,5+.
struct SimilarityTable {
  std::vector<SimilarityBucket> buckets;
};

// Mean cosine similarity over all unordered pairs of archive entries,
// grouped by the phoneme edit distance of their records in `dataset`.
SimilarityTable similarity_table(const EmbeddingArchive& archive, const Dataset& dataset,
                                 std::size_t open_bucket = 5);

void write_similarity_table(const SimilarityTable& table, const std::filesystem::path& path);

// (1/|R|) * sum over relevant ranks k of precision@k. Empty R has no AP.
std::optional<double> average_precision(const RankedResult& ranked,
                                        const std::set<std::string>& relevant);

struct QueryReport {
  std::string id;
  std::string word;
  std::size_t num_relevant = 0;
  std::optional<double> ap;  // empty when the query had nothing to find
};

struct MapReport {
  std::optional<double> map;  // empty when no query was scorable
  std::size_t scored = 0;
  std::size_t excluded = 0;
  std::vector<QueryReport> queries;
};

// Every archive entry queries the rest; relevance is a case-folded word match.
MapReport mean_average_precision(const EmbeddingArchive& archive);
MapReport mean_average_precision_dtw(const Dataset& dataset, const DtwOptions& dtw = {});

void write_query_report(const MapReport& report, const std::filesystem::path& path);

struct WordMean {
  std::string word;
  Vector mean;
  std::size_t count = 0;
};

// Means keyed by case-folded word label, in order of first appearance.
std::vector<WordMean> word_means(const EmbeddingArchive& archive);

// mean(w1) - mean(w2) per pair. Throws Error naming an unknown word.
std::vector<Vector> word_difference_vectors(
    const EmbeddingArchive& archive,
    const std::vector<std::pair<std::string, std::string>>& pairs);

struct ProjectionOptions {
  int max_iterations = 1000;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
};

// Top-2 principal-component scores (rows) of the centered vectors.
Matrix project_2d(const std::vector<Vector>& vectors, const ProjectionOptions& options = {});

}  // namespace aw2v

#endif  // AW2V_EVAL_HPP_

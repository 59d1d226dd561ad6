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

#ifndef AW2V_RETRIEVAL_HPP_
#define AW2V_RETRIEVAL_HPP_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aw2v/baselines.hpp"
#include "aw2v/data.hpp"
#include "aw2v/seq2seq.hpp"
#include "aw2v/types.hpp"

namespace aw2v {

// u.v / (|u||v|), or 0 when either vector is zero.
double cosine_similarity(const Vector& u, const Vector& v);

// Maps a segment to a fixed-width vector.
struct SegmentEncoder {
  Index width = 0;
  std::function<Vector(const FeatureSequence&)> encode;
};

SegmentEncoder autoencoder_encoder(ModelParams params);
SegmentEncoder naive_encoder(Index input_dim, int segments);

struct ArchiveEntry {
  std::string id;
  std::string word;
  Vector embedding;
};

class EmbeddingArchive {
 public:
  explicit EmbeddingArchive(Index dim) : dim_(dim) {}

  // Throws FormatError on a duplicate id, DimensionError on width mismatch or
  // non-finite values.
  void add(ArchiveEntry entry);

  Index dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<ArchiveEntry>& entries() const { return entries_; }
  const ArchiveEntry* find(std::string_view id) const;

  friend bool operator==(const EmbeddingArchive& a, const EmbeddingArchive& b);

 private:
  Index dim_;
  std::vector<ArchiveEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Encodes every record in `dataset` (OpenMP across records), manifest order.
// A failing record is rethrown as an Error naming its id.
EmbeddingArchive build_archive(const SegmentEncoder& encoder, const Dataset& dataset);

struct RankedItem {
  std::string id;
  double score = 0.0;

  friend bool operator==(const RankedItem&, const RankedItem&) = default;
};

// Descending score, ascending id among equal scores.
using RankedResult = std::vector<RankedItem>;

struct RankOptions {
  std::optional<std::string> exclude_id;
  std::optional<std::size_t> top_k;
};

// Strict (-score, id) ordering used by every ranking.
bool ranks_before(const RankedItem& a, const RankedItem& b);
void sort_and_truncate(RankedResult& result, std::optional<std::size_t> top_k);

RankedResult rank(const Vector& query, const EmbeddingArchive& archive,
                  const RankOptions& options = {});

// Scores each record by -dtw_distance.
RankedResult rank_dtw(const FeatureSequence& query, const Dataset& dataset,
                      const RankOptions& options = {}, const DtwOptions& dtw = {});

// CSV with header id,word,z0,...,z{d-1}.
void write_archive(const EmbeddingArchive& archive, const std::filesystem::path& path);
EmbeddingArchive read_archive(const std::filesystem::path& path);

}  // namespace aw2v

#endif  // AW2V_RETRIEVAL_HPP_

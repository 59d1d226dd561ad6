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

#include "aw2v/serial.hpp"

#include <limits>
#include <map>
#include <set>

#include "aw2v/errors.hpp"

namespace aw2v::serial {

EmbeddingArchive build_archive(const SegmentEncoder& encoder, const Dataset& dataset) {
  EmbeddingArchive archive(encoder.width);
  for (const auto& r : dataset.records()) {
    Vector v;
    try {
      v = encoder.encode(r.features);
    } catch (const std::exception& e) {
      throw Error("encoding record '" + r.id + "' failed: " + e.what());
    }
    archive.add({r.id, r.word, std::move(v)});
  }
  return archive;
}

RankedResult rank(const Vector& query, const EmbeddingArchive& archive,
                  const RankOptions& options) {
  if (query.size() != archive.dim()) throw DimensionError("query width mismatch");
  RankedResult result;
  for (const auto& e : archive.entries()) {
    if (options.exclude_id && e.id == *options.exclude_id) continue;
    result.push_back({e.id, cosine_similarity(query, e.embedding)});
  }
  sort_and_truncate(result, options.top_k);
  return result;
}

RankedResult rank_dtw(const FeatureSequence& query, const Dataset& dataset,
                      const RankOptions& options, const DtwOptions& dtw) {
  RankedResult result;
  for (const auto& r : dataset.records()) {
    if (options.exclude_id && r.id == *options.exclude_id) continue;
    result.push_back({r.id, -dtw_distance(query, r.features, dtw)});
  }
  sort_and_truncate(result, options.top_k);
  return result;
}

SimilarityTable similarity_table(const EmbeddingArchive& archive, const Dataset& dataset,
                                 std::size_t open_bucket) {
  if (open_bucket < 1) throw Error("open bucket must be >= 1");
  const auto& entries = archive.entries();
  std::vector<const std::vector<std::string>*> phonemes;
  for (const auto& e : entries) {
    const SegmentRecord* r = dataset.find(e.id);
    if (r == nullptr) throw Error("archive id '" + e.id + "' is not in the manifest");
    if (!r->phonemes) throw Error("record '" + e.id + "' has no phoneme sequence");
    phonemes.push_back(&*r->phonemes);
  }
  const std::size_t buckets = open_bucket + 1;
  std::vector<double> sums(entries.size() * buckets, 0.0);
  std::vector<std::size_t> counts(entries.size() * buckets, 0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      const std::size_t b =
          std::min(phoneme_edit_distance(*phonemes[i], *phonemes[j]), open_bucket);
      sums[i * buckets + b] += cosine_similarity(entries[i].embedding, entries[j].embedding);
      ++counts[i * buckets + b];
    }
  }
  SimilarityTable table;
  for (std::size_t b = 0; b < buckets; ++b) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      total += sums[i * buckets + b];
      count += counts[i * buckets + b];
    }
    table.buckets.push_back(
        {b == open_bucket ? std::to_string(b) + "+" : std::to_string(b), count,
         count ? total / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN()});
  }
  return table;
}

namespace {

template <typename Items, typename RankFn>
MapReport map_over(const Items& items, RankFn&& rank_one) {
  std::map<std::string, std::set<std::string>> by_word;
  for (const auto& q : items) by_word[fold_case(q.word)].insert(q.id);

  MapReport report;
  double sum = 0.0;
  for (const auto& q : items) {
    std::set<std::string> relevant = by_word.at(fold_case(q.word));
    relevant.erase(q.id);
    QueryReport out{q.id, q.word, relevant.size(), std::nullopt};
    if (!relevant.empty()) {
      out.ap = average_precision(rank_one(q), relevant);
      sum += *out.ap;
      ++report.scored;
    } else {
      ++report.excluded;
    }
    report.queries.push_back(std::move(out));
  }
  if (report.scored) report.map = sum / static_cast<double>(report.scored);
  return report;
}

}  // namespace

MapReport mean_average_precision(const EmbeddingArchive& archive) {
  return map_over(archive.entries(), [&](const ArchiveEntry& q) {
    return serial::rank(q.embedding, archive, {.exclude_id = q.id, .top_k = {}});
  });
}

MapReport mean_average_precision_dtw(const Dataset& dataset, const DtwOptions& dtw) {
  return map_over(dataset.records(), [&](const SegmentRecord& q) {
    return serial::rank_dtw(q.features, dataset, {.exclude_id = q.id, .top_k = {}}, dtw);
  });
}

}  // namespace aw2v::serial

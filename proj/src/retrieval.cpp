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

#include "aw2v/retrieval.hpp"

#include <algorithm>
#include <fstream>
#include <memory>

#include "aw2v/csv.hpp"
#include "aw2v/errors.hpp"

namespace aw2v {

double cosine_similarity(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) {
    throw DimensionError("cosine of vectors with lengths " + std::to_string(u.size()) +
                         " and " + std::to_string(v.size()));
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

SegmentEncoder autoencoder_encoder(ModelParams params) {
  params.check_shapes();
  const Index width = params.hidden_dim;
  auto shared = std::make_shared<const ModelParams>(std::move(params));
  return {width, [shared](const FeatureSequence& x) { return encode(*shared, x); }};
}

SegmentEncoder naive_encoder(Index input_dim, int segments) {
  if (segments < 1) throw DimensionError("segment count must be >= 1");
  return {input_dim * segments, [input_dim, segments](const FeatureSequence& x) {
            if (x.dim() != input_dim) throw DimensionError("input dimension mismatch");
            return naive_encode(x, segments).values;
          }};
}

void EmbeddingArchive::add(ArchiveEntry entry) {
  if (entry.embedding.size() != dim_) {
    throw DimensionError("embedding for '" + entry.id + "' has width " +
                         std::to_string(entry.embedding.size()) + ", archive has " +
                         std::to_string(dim_));
  }
  if (!entry.embedding.allFinite()) {
    throw DimensionError("embedding for '" + entry.id + "' is not finite");
  }
  if (!index_.emplace(entry.id, entries_.size()).second) {
    throw FormatError("duplicate archive id '" + entry.id + "'");
  }
  entries_.push_back(std::move(entry));
}

const ArchiveEntry* EmbeddingArchive::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

bool operator==(const EmbeddingArchive& a, const EmbeddingArchive& b) {
  if (a.dim_ != b.dim_ || a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t k = 0; k < a.entries_.size(); ++k) {
    const auto& x = a.entries_[k];
    const auto& y = b.entries_[k];
    if (x.id != y.id || x.word != y.word || x.embedding != y.embedding) return false;
  }
  return true;
}

EmbeddingArchive build_archive(const SegmentEncoder& encoder, const Dataset& dataset) {
  const auto& records = dataset.records();
  const auto n = static_cast<std::ptrdiff_t>(records.size());
  std::vector<Vector> vectors(records.size());
  std::vector<std::string> errors(records.size());
  std::vector<char> failed(records.size(), 0);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      vectors[k] = encoder.encode(records[k].features);
    } catch (const std::exception& e) {
      failed[k] = 1;
      errors[k] = e.what();
    }
  }

  EmbeddingArchive archive(encoder.width);
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (failed[k]) throw Error("encoding record '" + records[k].id + "' failed: " + errors[k]);
    archive.add({records[k].id, records[k].word, std::move(vectors[k])});
  }
  return archive;
}

bool ranks_before(const RankedItem& a, const RankedItem& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

void sort_and_truncate(RankedResult& result, std::optional<std::size_t> top_k) {
  std::sort(result.begin(), result.end(), ranks_before);
  if (top_k && result.size() > *top_k) result.resize(*top_k);
}

RankedResult rank(const Vector& query, const EmbeddingArchive& archive,
                  const RankOptions& options) {
  if (query.size() != archive.dim()) {
    throw DimensionError("query width " + std::to_string(query.size()) +
                         " does not match archive width " + std::to_string(archive.dim()));
  }
  const auto& entries = archive.entries();
  const auto n = static_cast<std::ptrdiff_t>(entries.size());
  std::vector<double> scores(entries.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    scores[k] = cosine_similarity(query, entries[k].embedding);
  }

  RankedResult result;
  result.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (options.exclude_id && entries[k].id == *options.exclude_id) continue;
    result.push_back({entries[k].id, scores[k]});
  }
  sort_and_truncate(result, options.top_k);
  return result;
}

RankedResult rank_dtw(const FeatureSequence& query, const Dataset& dataset,
                      const RankOptions& options, const DtwOptions& dtw) {
  if (!dataset.empty() && query.dim() != dataset.dim()) {
    throw DimensionError("query dimension does not match the dataset");
  }
  const auto& records = dataset.records();
  const auto n = static_cast<std::ptrdiff_t>(records.size());
  std::vector<double> scores(records.size());
  std::vector<char> skip(records.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    if (options.exclude_id && records[k].id == *options.exclude_id) {
      skip[k] = 1;
      continue;
    }
    scores[k] = -dtw_distance(query, records[k].features, dtw);
  }

  RankedResult result;
  result.reserve(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (!skip[k]) result.push_back({records[k].id, scores[k]});
  }
  sort_and_truncate(result, options.top_k);
  return result;
}

void write_archive(const EmbeddingArchive& archive, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write archive " + path.string());
  std::string text = "id,word";
  for (Index k = 0; k < archive.dim(); ++k) text += ",z" + std::to_string(k);
  text += '\n';
  for (const auto& e : archive.entries()) {
    text += e.id;
    text += ',';
    text += e.word;
    for (Index k = 0; k < e.embedding.size(); ++k) {
      text += ',';
      text += csv::format_double(e.embedding[k]);
    }
    text += '\n';
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

EmbeddingArchive read_archive(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open archive " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty archive file");
  const auto header = csv::split(csv::trim(line));
  if (header.size() < 3 || header[0] != "id" || header[1] != "word") {
    throw FormatError(path.string() + ": header must start with id,word,z0");
  }
  const auto dim = static_cast<Index>(header.size() - 2);
  for (Index k = 0; k < dim; ++k) {
    if (header[k + 2] != "z" + std::to_string(k)) {
      throw FormatError(path.string() + ": unexpected column '" + std::string(header[k + 2]) + "'");
    }
  }
  EmbeddingArchive archive(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = csv::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = csv::split(trimmed);
    if (static_cast<Index>(fields.size()) != dim + 2) {
      throw DimensionError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(dim + 2) + " fields");
    }
    Vector v(dim);
    for (Index k = 0; k < dim; ++k) v[k] = csv::parse_double(fields[k + 2]);
    archive.add({std::string(fields[0]), std::string(fields[1]), std::move(v)});
  }
  return archive;
}

}  // namespace aw2v

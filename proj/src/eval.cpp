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

#include "aw2v/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>

#include "aw2v/csv.hpp"
#include "aw2v/errors.hpp"

namespace aw2v {

std::size_t phoneme_edit_distance(std::span<const std::string> p,
                                  std::span<const std::string> q) {
  std::vector<std::size_t> row(q.size() + 1);
  for (std::size_t j = 0; j <= q.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= p.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= q.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (p[i - 1] == q[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[q.size()];
}

namespace {

std::vector<const std::vector<std::string>*> phonemes_for(const EmbeddingArchive& archive,
                                                          const Dataset& dataset) {
  std::vector<const std::vector<std::string>*> out;
  out.reserve(archive.size());
  for (const auto& e : archive.entries()) {
    const SegmentRecord* r = dataset.find(e.id);
    if (r == nullptr) throw Error("archive id '" + e.id + "' is not in the manifest");
    if (!r->phonemes) throw Error("record '" + e.id + "' has no phoneme sequence");
    out.push_back(&*r->phonemes);
  }
  return out;
}

}  // namespace

SimilarityTable similarity_table(const EmbeddingArchive& archive, const Dataset& dataset,
                                 std::size_t open_bucket) {
  if (open_bucket < 1) throw Error("open bucket must be >= 1");
  const auto phonemes = phonemes_for(archive, dataset);
  const auto& entries = archive.entries();
  const std::size_t buckets = open_bucket + 1;
  const auto n = static_cast<std::ptrdiff_t>(entries.size());

  // Per-row partial sums, reduced in row order afterwards so the result does
  // not depend on thread scheduling.
  std::vector<double> sums(entries.size() * buckets, 0.0);
  std::vector<std::size_t> counts(entries.size() * buckets, 0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = i + 1; j < n; ++j) {
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

void write_similarity_table(const SimilarityTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write " + path.string());
  out << "edit_distance,pair_count,mean_cosine\n";
  for (const auto& b : table.buckets) {
    out << b.label << ',' << b.pair_count << ','
        << (b.pair_count ? csv::format_double(b.mean_cosine) : std::string()) << '\n';
  }
}

std::optional<double> average_precision(const RankedResult& ranked,
                                        const std::set<std::string>& relevant) {
  if (relevant.empty()) return std::nullopt;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < ranked.size() && hits < relevant.size(); ++k) {
    if (relevant.count(ranked[k].id)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

namespace {

struct Query {
  std::string id;
  std::string word;
  std::string folded;
};

template <typename RankFn>
MapReport run_queries(const std::vector<Query>& queries, RankFn&& rank_one) {
  std::map<std::string, std::set<std::string>> by_word;
  for (const auto& q : queries) by_word[q.folded].insert(q.id);

  MapReport report;
  report.queries.resize(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
  std::vector<std::string> errors(queries.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const Query& q = queries[k];
    std::set<std::string> relevant = by_word.at(q.folded);
    relevant.erase(q.id);
    QueryReport& out = report.queries[k];
    out.id = q.id;
    out.word = q.word;
    out.num_relevant = relevant.size();
    if (relevant.empty()) continue;
    try {
      out.ap = average_precision(rank_one(k), relevant);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (std::size_t k = 0; k < queries.size(); ++k) {
    if (!errors[k].empty()) throw Error("query '" + queries[k].id + "': " + errors[k]);
  }

  double sum = 0.0;
  for (const auto& q : report.queries) {
    if (q.ap) {
      sum += *q.ap;
      ++report.scored;
    } else {
      ++report.excluded;
    }
  }
  if (report.scored) report.map = sum / static_cast<double>(report.scored);
  return report;
}

}  // namespace

MapReport mean_average_precision(const EmbeddingArchive& archive) {
  std::vector<Query> queries;
  for (const auto& e : archive.entries()) queries.push_back({e.id, e.word, fold_case(e.word)});
  const auto& entries = archive.entries();
  return run_queries(queries, [&](std::size_t k) {
    return rank(entries[k].embedding, archive, {.exclude_id = entries[k].id, .top_k = {}});
  });
}

MapReport mean_average_precision_dtw(const Dataset& dataset, const DtwOptions& dtw) {
  std::vector<Query> queries;
  for (const auto& r : dataset.records()) queries.push_back({r.id, r.word, fold_case(r.word)});
  const auto& records = dataset.records();
  return run_queries(queries, [&](std::size_t k) {
    return rank_dtw(records[k].features, dataset, {.exclude_id = records[k].id, .top_k = {}},
                    dtw);
  });
}

void write_query_report(const MapReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write " + path.string());
  out << "query_id,word,num_relevant,ap\n";
  for (const auto& q : report.queries) {
    out << q.id << ',' << q.word << ',' << q.num_relevant << ','
        << (q.ap ? csv::format_double(*q.ap) : std::string()) << '\n';
  }
}

std::vector<WordMean> word_means(const EmbeddingArchive& archive) {
  std::vector<WordMean> means;
  std::map<std::string, std::size_t> slot;
  for (const auto& e : archive.entries()) {
    const std::string key = fold_case(e.word);
    auto [it, fresh] = slot.emplace(key, means.size());
    if (fresh) means.push_back({key, Vector::Zero(archive.dim()), 0});
    WordMean& m = means[it->second];
    m.mean += e.embedding;
    ++m.count;
  }
  for (auto& m : means) m.mean /= static_cast<double>(m.count);
  return means;
}

std::vector<Vector> word_difference_vectors(
    const EmbeddingArchive& archive,
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  const auto means = word_means(archive);
  auto lookup = [&](const std::string& word) -> const Vector& {
    const std::string key = fold_case(word);
    for (const auto& m : means) {
      if (m.word == key) return m.mean;
    }
    throw Error("word '" + word + "' does not occur in the archive");
  };
  std::vector<Vector> out;
  out.reserve(pairs.size());
  for (const auto& [w1, w2] : pairs) out.push_back(lookup(w1) - lookup(w2));
  return out;
}

namespace {

// Dominant eigenvector of the symmetric PSD matrix `c`, or zero if `c` has no
// energy above `floor`.
Vector power_iteration(const Matrix& c, Vector v, const ProjectionOptions& options,
                       double floor) {
  v.normalize();
  for (int it = 0; it < options.max_iterations; ++it) {
    Vector w = c * v;
    const double norm = w.norm();
    if (norm <= floor) return Vector::Zero(v.size());
    w /= norm;
    const double delta = (w - v).norm();
    v = std::move(w);
    if (delta < options.tolerance) break;
  }
  return v;
}

}  // namespace

Matrix project_2d(const std::vector<Vector>& vectors, const ProjectionOptions& options) {
  if (vectors.size() < 2) throw Error("projection needs at least two vectors");
  const Index dim = vectors.front().size();
  Matrix x(static_cast<Index>(vectors.size()), dim);
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].size() != dim) throw DimensionError("vectors differ in length");
    x.row(static_cast<Index>(k)) = vectors[k].transpose();
  }
  x.rowwise() -= x.colwise().mean();
  Matrix cov = x.transpose() * x;
  const double floor = 1e-14 * std::max(cov.trace(), std::numeric_limits<double>::min());

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Matrix components = Matrix::Zero(dim, 2);
  for (Index pc = 0; pc < 2 && pc < dim; ++pc) {
    Vector start(dim);
    for (Index k = 0; k < dim; ++k) start[k] = normal(rng);
    Vector v = power_iteration(cov, start, options, floor);
    if (v.isZero(0.0)) break;
    Index largest = 0;
    v.cwiseAbs().maxCoeff(&largest);
    if (v[largest] < 0) v = -v;
    components.col(pc) = v;
    const double lambda = v.dot(cov * v);
    cov -= lambda * v * v.transpose();
  }
  return x * components;
}

}  // namespace aw2v

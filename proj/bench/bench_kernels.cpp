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

// Serial reference kernels against their OpenMP counterparts on a synthetic
// corpus. Thread count follows OMP_NUM_THREADS.

#include <map>

#include <benchmark/benchmark.h>

#include "aw2v/seq2seq.hpp"
#include "aw2v/serial.hpp"

namespace {

using namespace aw2v;

struct Workload {
  Dataset corpus;
  SegmentEncoder encoder;
  EmbeddingArchive archive{1};

  explicit Workload(int words) : encoder(autoencoder_encoder(init_params(8, 32, 7))) {
    SyntheticConfig config;
    config.num_words = words;
    config.tokens_per_word = 5;
    config.test_tokens_per_word = 5;
    config.dim = 8;
    config.seed = 1;
    corpus = generate_synthetic(config);
    archive = serial::build_archive(encoder, corpus);
  }
};

const Workload& workload(int words) {
  static std::map<int, Workload> cache;
  auto it = cache.find(words);
  if (it == cache.end()) it = cache.try_emplace(words, words).first;
  return it->second;
}

void BM_BuildArchiveSerial(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::build_archive(w.encoder, w.corpus));
}

void BM_BuildArchiveParallel(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_archive(w.encoder, w.corpus));
}

void BM_MapSerial(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::mean_average_precision(w.archive));
}

void BM_MapParallel(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mean_average_precision(w.archive));
}

void BM_RankDtwSerial(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)));
  const FeatureSequence& query = w.corpus.records().front().features;
  for (auto _ : state) benchmark::DoNotOptimize(serial::rank_dtw(query, w.corpus));
}

void BM_RankDtwParallel(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)));
  const FeatureSequence& query = w.corpus.records().front().features;
  for (auto _ : state) benchmark::DoNotOptimize(rank_dtw(query, w.corpus));
}

void BM_SimilarityTableSerial(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::similarity_table(w.archive, w.corpus));
}

void BM_SimilarityTableParallel(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(similarity_table(w.archive, w.corpus));
}

}  // namespace

BENCHMARK(BM_BuildArchiveSerial)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildArchiveParallel)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MapSerial)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MapParallel)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankDtwSerial)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankDtwParallel)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimilarityTableSerial)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimilarityTableParallel)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

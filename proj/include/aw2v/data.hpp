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

#ifndef AW2V_DATA_HPP_
#define AW2V_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aw2v/types.hpp"

namespace aw2v {

// A T x D block of acoustic frames, one frame per row. T >= 1, all finite.
class FeatureSequence {
 public:
  explicit FeatureSequence(Matrix frames);

  Index length() const { return frames_.rows(); }
  Index dim() const { return frames_.cols(); }
  const Matrix& frames() const { return frames_; }
  Vector frame(Index t) const { return frames_.row(t).transpose(); }

  friend bool operator==(const FeatureSequence& a, const FeatureSequence& b) {
    return a.frames_.rows() == b.frames_.rows() &&
           a.frames_.cols() == b.frames_.cols() && a.frames_ == b.frames_;
  }

 private:
  Matrix frames_;
};

enum class Split { kTrain, kTest };

std::string_view split_name(Split split);
Split parse_split(std::string_view name);

struct SegmentRecord {
  std::string id;
  std::string word;
  std::optional<std::vector<std::string>> phonemes;
  Split split = Split::kTrain;
  FeatureSequence features;
};

class Dataset {
 public:
  Dataset() = default;

  // Throws DimensionError on width mismatch, FormatError on a duplicate id or
  // an empty phoneme list.
  void add(SegmentRecord record);

  const std::vector<SegmentRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  Index dim() const { return dim_; }

  // Records of one split, manifest order preserved.
  Dataset subset(Split split) const;
  const SegmentRecord* find(std::string_view id) const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  std::vector<SegmentRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
  Index dim_ = 0;
};

bool operator==(const SegmentRecord& a, const SegmentRecord& b);

enum class FeatureFormat { kCsv, kBinary };

// Feature files. CSV: one frame per line, comma separated, no header.
// Binary: int32 T, int32 D, then T*D float32, all little-endian.
FeatureSequence read_features(const std::filesystem::path& path);
void write_features(const FeatureSequence& features,
                    const std::filesystem::path& path, FeatureFormat format);

// One JSON object per line; feature paths are relative to the manifest.
Dataset parse_manifest(const std::filesystem::path& path);

// Writes `manifest_path` plus one feature file per record under
// `<manifest dir>/features/`.
void write_manifest(const Dataset& dataset,
                    const std::filesystem::path& manifest_path,
                    FeatureFormat format = FeatureFormat::kCsv);

struct SyntheticConfig {
  int alphabet_size = 10;
  int num_words = 40;
  int tokens_per_word = 15;
  // Tokens with index >= tokens_per_word - test_tokens_per_word go to test.
  int test_tokens_per_word = 5;
  std::pair<int, int> phonemes_per_word{3, 6};
  Index dim = 13;
  std::pair<int, int> frames_per_phoneme{2, 4};
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

// Generator output with the hidden state that produced it.
struct SyntheticCorpus {
  Dataset dataset;
  Matrix prototypes;  // alphabet_size x dim
  std::vector<std::vector<int>> words;  // symbol indices per word
  // Per record (dataset order): frames drawn for each phoneme.
  std::vector<std::vector<int>> phoneme_lengths;
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& config);
Dataset generate_synthetic(const SyntheticConfig& config);

// Renders phoneme symbols as prototype rows repeated `lengths[k]` times.
// Noise is not added.
Matrix render_clean(const Matrix& prototypes, const std::vector<int>& symbols,
                    const std::vector<int>& lengths);

std::string phoneme_symbol(int index);
std::string fold_case(std::string_view word);

}  // namespace aw2v

#endif  // AW2V_DATA_HPP_

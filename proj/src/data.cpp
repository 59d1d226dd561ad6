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

#include "aw2v/data.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "aw2v/csv.hpp"
#include "aw2v/errors.hpp"
#include "json.hpp"

namespace aw2v {

namespace fs = std::filesystem;

FeatureSequence::FeatureSequence(Matrix frames) : frames_(std::move(frames)) {
  if (frames_.rows() < 1 || frames_.cols() < 1) {
    throw DimensionError("feature sequence must have at least one frame and one dimension");
  }
  if (!frames_.allFinite()) {
    throw FormatError("feature sequence contains non-finite values");
  }
}

std::string_view split_name(Split split) {
  return split == Split::kTrain ? "train" : "test";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  throw FormatError("unknown split '" + std::string(name) + "'");
}

void Dataset::add(SegmentRecord record) {
  if (record.phonemes && record.phonemes->empty()) {
    throw FormatError("record '" + record.id + "' has an empty phoneme list");
  }
  if (find(record.id) != nullptr) {
    throw FormatError("duplicate record id '" + record.id + "'");
  }
  if (records_.empty()) {
    dim_ = record.features.dim();
  } else if (record.features.dim() != dim_) {
    throw DimensionError("record '" + record.id + "' has dimension " +
                         std::to_string(record.features.dim()) + ", dataset has " +
                         std::to_string(dim_));
  }
  index_.emplace(record.id, records_.size());
  records_.push_back(std::move(record));
}

Dataset Dataset::subset(Split split) const {
  Dataset out;
  for (const auto& r : records_) {
    if (r.split == split) out.add(r);
  }
  return out;
}

const SegmentRecord* Dataset::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &records_[it->second];
}

bool operator==(const SegmentRecord& a, const SegmentRecord& b) {
  return a.id == b.id && a.word == b.word && a.phonemes == b.phonemes &&
         a.split == b.split && a.features == b.features;
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.dim_ == b.dim_ && a.records_ == b.records_;
}

namespace {

bool has_extension(const fs::path& path, std::string_view ext) {
  return path.extension() == ext;
}

FeatureSequence read_csv_features(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open feature file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto trimmed = csv::trim(line);
    if (trimmed.empty()) continue;
    std::vector<double> row;
    for (auto field : csv::split(trimmed)) {
      try {
        row.push_back(csv::parse_double(field));
      } catch (const FormatError& e) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DimensionError(path.string() + ": row " + std::to_string(rows.size()) +
                           " has width " + std::to_string(row.size()) + ", expected " +
                           std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(path.string() + ": no frames");
  Matrix frames(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index t = 0; t < frames.rows(); ++t) {
    for (Index k = 0; k < frames.cols(); ++k) frames(t, k) = rows[t][k];
  }
  return FeatureSequence(std::move(frames));
}

template <typename T>
T from_little_endian(const char* bytes) {
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* p = reinterpret_cast<unsigned char*>(&value);
    std::reverse(p, p + sizeof(T));
  }
  return value;
}

template <typename T>
void append_little_endian(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.append(bytes, sizeof(T));
}

FeatureSequence read_binary_features(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open feature file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 8) throw FormatError(path.string() + ": truncated header");
  auto rows = from_little_endian<std::int32_t>(bytes.data());
  auto cols = from_little_endian<std::int32_t>(bytes.data() + 4);
  if (rows < 1 || cols < 1) throw FormatError(path.string() + ": bad shape in header");
  auto expected = 8 + static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 4;
  if (bytes.size() != expected) {
    throw FormatError(path.string() + ": expected " + std::to_string(expected) +
                      " bytes, found " + std::to_string(bytes.size()));
  }
  Matrix frames(rows, cols);
  const char* p = bytes.data() + 8;
  for (Index t = 0; t < rows; ++t) {
    for (Index k = 0; k < cols; ++k, p += 4) frames(t, k) = from_little_endian<float>(p);
  }
  return FeatureSequence(std::move(frames));
}

}  // namespace

FeatureSequence read_features(const fs::path& path) {
  if (!fs::exists(path)) throw IngestionError("feature file not found: " + path.string());
  return has_extension(path, ".bin") ? read_binary_features(path) : read_csv_features(path);
}

void write_features(const FeatureSequence& features, const fs::path& path,
                    FeatureFormat format) {
  const Matrix& m = features.frames();
  std::string out;
  if (format == FeatureFormat::kBinary) {
    append_little_endian(out, static_cast<std::int32_t>(m.rows()));
    append_little_endian(out, static_cast<std::int32_t>(m.cols()));
    for (Index t = 0; t < m.rows(); ++t) {
      for (Index k = 0; k < m.cols(); ++k) {
        append_little_endian(out, static_cast<float>(m(t, k)));
      }
    }
  } else {
    for (Index t = 0; t < m.rows(); ++t) {
      for (Index k = 0; k < m.cols(); ++k) {
        if (k) out += ',';
        out += csv::format_double(m(t, k));
      }
      out += '\n';
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IngestionError("cannot write feature file " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

Dataset parse_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open manifest " + path.string());
  const fs::path base = path.parent_path();
  Dataset dataset;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (!obj.is_object()) throw FormatError(where + ": record is not an object");
    for (const char* key : {"id", "word", "split", "features"}) {
      if (!obj.contains(key) || !obj[key].is_string()) {
        throw FormatError(where + ": missing string field '" + key + "'");
      }
    }
    const auto id = obj["id"].get<std::string>();
    std::optional<std::vector<std::string>> phonemes;
    if (obj.contains("phonemes") && !obj["phonemes"].is_null()) {
      try {
        phonemes = obj["phonemes"].get<std::vector<std::string>>();
      } catch (const nlohmann::json::exception&) {
        throw FormatError(where + ": 'phonemes' must be an array of strings");
      }
    }
    const fs::path feature_path = base / obj["features"].get<std::string>();
    if (!fs::exists(feature_path)) {
      throw IngestionError("record '" + id + "': feature file not found: " +
                           feature_path.string());
    }
    auto features = [&] {
      try {
        return read_features(feature_path);
      } catch (const DimensionError& e) {
        throw DimensionError("record '" + id + "': " + e.what());
      } catch (const Error& e) {
        throw IngestionError("record '" + id + "': " + e.what());
      }
    }();
    dataset.add(SegmentRecord{.id = id,
                              .word = obj["word"].get<std::string>(),
                              .phonemes = std::move(phonemes),
                              .split = parse_split(obj["split"].get<std::string>()),
                              .features = std::move(features)});
  }
  return dataset;
}

void write_manifest(const Dataset& dataset, const fs::path& manifest_path,
                    FeatureFormat format) {
  const fs::path base = manifest_path.parent_path();
  const fs::path feature_dir = base / "features";
  fs::create_directories(feature_dir);
  const char* ext = format == FeatureFormat::kBinary ? ".bin" : ".csv";
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw IngestionError("cannot write manifest " + manifest_path.string());
  for (const auto& r : dataset.records()) {
    const std::string rel = "features/" + r.id + ext;
    write_features(r.features, base / rel, format);
    nlohmann::ordered_json obj;
    obj["id"] = r.id;
    obj["word"] = r.word;
    if (r.phonemes) obj["phonemes"] = *r.phonemes;
    obj["split"] = split_name(r.split);
    obj["features"] = rel;
    out << obj.dump() << '\n';
  }
}

std::string phoneme_symbol(int index) { return "ph" + std::to_string(index); }

std::string fold_case(std::string_view word) {
  std::string out(word);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Matrix render_clean(const Matrix& prototypes, const std::vector<int>& symbols,
                    const std::vector<int>& lengths) {
  if (symbols.size() != lengths.size()) {
    throw DimensionError("one frame count per phoneme is required");
  }
  Index total = 0;
  for (int len : lengths) total += len;
  Matrix frames(total, prototypes.cols());
  Index row = 0;
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    for (int f = 0; f < lengths[k]; ++f) frames.row(row++) = prototypes.row(symbols[k]);
  }
  return frames;
}

namespace {

// Number of distinct strings with lengths in [lo, hi] over `alphabet`
// symbols, saturating at `cap`.
std::uint64_t count_strings(int alphabet, int lo, int hi, std::uint64_t cap) {
  std::uint64_t total = 0;
  for (int len = lo; len <= hi; ++len) {
    std::uint64_t n = 1;
    for (int k = 0; k < len && n <= cap; ++k) n *= static_cast<std::uint64_t>(alphabet);
    total += std::min(n, cap);
    if (total >= cap) return cap;
  }
  return total;
}

void check_config(const SyntheticConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw GenerationError(what);
  };
  require(c.alphabet_size >= 2, "alphabet_size must be >= 2");
  require(c.num_words >= 1, "num_words must be >= 1");
  require(c.tokens_per_word >= 1, "tokens_per_word must be >= 1");
  require(c.test_tokens_per_word >= 0 && c.test_tokens_per_word <= c.tokens_per_word,
          "test_tokens_per_word must lie in [0, tokens_per_word]");
  require(c.phonemes_per_word.first >= 1 &&
              c.phonemes_per_word.first <= c.phonemes_per_word.second,
          "phonemes_per_word range must be non-empty with min >= 1");
  require(c.frames_per_phoneme.first >= 1 &&
              c.frames_per_phoneme.first <= c.frames_per_phoneme.second,
          "frames_per_phoneme range must be non-empty with min >= 1");
  require(c.dim >= 1, "dim must be >= 1");
  require(std::isfinite(c.noise_sigma) && c.noise_sigma >= 0, "noise_sigma must be >= 0");
  const auto want = static_cast<std::uint64_t>(c.num_words);
  const auto available = count_strings(c.alphabet_size, c.phonemes_per_word.first,
                                       c.phonemes_per_word.second, want);
  require(available >= want, "cannot draw " + std::to_string(c.num_words) +
                                 " distinct words: only " + std::to_string(available) +
                                 " strings exist");
}

std::string zero_pad(int value, int width) {
  auto s = std::to_string(value);
  if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), '0');
  return s;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& config) {
  check_config(config);
  std::mt19937_64 rng(config.seed);
  SyntheticCorpus corpus;

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  corpus.prototypes.resize(config.alphabet_size, config.dim);
  for (Index s = 0; s < corpus.prototypes.rows(); ++s) {
    for (Index k = 0; k < corpus.prototypes.cols(); ++k) corpus.prototypes(s, k) = unit(rng);
  }

  std::uniform_int_distribution<int> word_len(config.phonemes_per_word.first,
                                              config.phonemes_per_word.second);
  std::uniform_int_distribution<int> symbol(0, config.alphabet_size - 1);
  std::set<std::vector<int>> seen;
  while (static_cast<int>(corpus.words.size()) < config.num_words) {
    std::vector<int> w(word_len(rng));
    for (auto& s : w) s = symbol(rng);
    if (seen.insert(w).second) corpus.words.push_back(std::move(w));
  }

  std::uniform_int_distribution<int> frames(config.frames_per_phoneme.first,
                                            config.frames_per_phoneme.second);
  std::normal_distribution<double> noise(0.0, config.noise_sigma > 0 ? config.noise_sigma : 1.0);
  const int word_width = static_cast<int>(std::to_string(config.num_words - 1).size());
  const int token_width = static_cast<int>(std::to_string(config.tokens_per_word - 1).size());
  const int first_test = config.tokens_per_word - config.test_tokens_per_word;

  for (int w = 0; w < config.num_words; ++w) {
    const auto& symbols = corpus.words[w];
    std::vector<std::string> phonemes;
    std::string label;
    for (int s : symbols) {
      phonemes.push_back(phoneme_symbol(s));
      if (!label.empty()) label += '_';
      label += phonemes.back();
    }
    for (int tok = 0; tok < config.tokens_per_word; ++tok) {
      std::vector<int> lengths(symbols.size());
      for (auto& len : lengths) len = frames(rng);
      Matrix m = render_clean(corpus.prototypes, symbols, lengths);
      if (config.noise_sigma > 0) {
        for (Index t = 0; t < m.rows(); ++t) {
          for (Index k = 0; k < m.cols(); ++k) m(t, k) += noise(rng);
        }
      }
      corpus.dataset.add(SegmentRecord{
          .id = "w" + zero_pad(w, word_width) + "_t" + zero_pad(tok, token_width),
          .word = label,
          .phonemes = phonemes,
          .split = tok >= first_test ? Split::kTest : Split::kTrain,
          .features = FeatureSequence(std::move(m))});
      corpus.phoneme_lengths.push_back(std::move(lengths));
    }
  }
  return corpus;
}

Dataset generate_synthetic(const SyntheticConfig& config) {
  return generate_synthetic_corpus(config).dataset;
}

}  // namespace aw2v

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

#include "aw2v/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "aw2v/baselines.hpp"
#include "aw2v/csv.hpp"
#include "aw2v/data.hpp"
#include "aw2v/errors.hpp"
#include "aw2v/eval.hpp"
#include "aw2v/retrieval.hpp"
#include "aw2v/seq2seq.hpp"

namespace aw2v::cli {

namespace fs = std::filesystem;

namespace {

// Thrown for argument combinations CLI11 cannot express.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Shortest round-trip text, so printed values reproduce exactly.
std::string exact(double v) { return csv::format_double(v); }

struct SplitChoice {
  std::string name = "test";

  Dataset apply(const Dataset& data) const {
    if (name == "all") return data;
    return data.subset(parse_split(name));
  }
};

void add_split_option(CLI::App* cmd, SplitChoice& split) {
  cmd->add_option("--split", split.name, "Records to use: train, test or all")
      ->check(CLI::IsMember({"train", "test", "all"}))
      ->capture_default_str();
}

// Either a checkpoint or the naive encoder, as chosen on the command line.
struct EncoderChoice {
  std::string checkpoint;
  std::string kind = "sa";
  int segments = 4;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--checkpoint", checkpoint, "Trained autoencoder checkpoint");
    cmd->add_option("--encoder", kind, "sa (checkpoint) or ne (naive encoder)")
        ->check(CLI::IsMember({"sa", "ne"}))
        ->capture_default_str();
    cmd->add_option("--m", segments, "Naive encoder segment count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  bool chosen() const { return kind == "ne" || !checkpoint.empty(); }

  SegmentEncoder make(Index input_dim) const {
    if (kind == "ne") return naive_encoder(input_dim, segments);
    if (checkpoint.empty()) throw UsageError("--checkpoint is required unless --encoder ne");
    ModelParams params = load_checkpoint(checkpoint);
    if (input_dim != params.input_dim) {
      throw DimensionError("checkpoint expects " + std::to_string(params.input_dim) +
                           "-dimensional features, data has " + std::to_string(input_dim));
    }
    return autoencoder_encoder(std::move(params));
  }
};

std::vector<int> pair_option(const std::vector<int>& v, const char* name) {
  if (v.size() != 2 || v[0] < 1 || v[0] > v[1]) {
    throw UsageError(std::string(name) + " expects MIN,MAX with 1 <= MIN <= MAX");
  }
  return v;
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  SyntheticConfig config;
  std::vector<int> phonemes{3, 6};
  std::vector<int> frames{2, 4};
  int test_tokens = -1;
  std::string format = "csv";
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SyntheticConfig c = a.config;
  auto ph = pair_option(a.phonemes, "--phonemes");
  auto fr = pair_option(a.frames, "--frames");
  c.phonemes_per_word = {ph[0], ph[1]};
  c.frames_per_phoneme = {fr[0], fr[1]};
  c.test_tokens_per_word = a.test_tokens >= 0 ? a.test_tokens : c.tokens_per_word / 3;
  const Dataset data = generate_synthetic(c);
  fs::create_directories(a.out_dir);
  const fs::path manifest = fs::path(a.out_dir) / "manifest.jsonl";
  write_manifest(data, manifest, a.format == "bin" ? FeatureFormat::kBinary : FeatureFormat::kCsv);
  out << "wrote " << data.size() << " records to " << manifest.string() << '\n';
  return kOk;
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string out;
  std::string mode = "sa";
  std::optional<std::uint64_t> seed;
  int hidden = 100;
  double lr = 0.3;
  int epochs = 500;
  std::optional<double> denoise;
  double clip_norm = 5.0;
  bool no_clip = false;
  std::string loss_log;
  int log_every = 10;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const Dataset data = parse_manifest(a.manifest);
  if (data.subset(Split::kTrain).empty()) throw Error("manifest has no train records");

  TrainConfig config;
  config.learning_rate = a.lr;
  config.epochs = a.epochs;
  config.denoise_p = a.denoise.value_or(a.mode == "dsa" ? 0.3 : 0.0);
  config.clip_norm = a.no_clip ? std::nullopt : std::optional<double>(a.clip_norm);
  config.seed = *a.seed;
  if (a.log_every > 0) {
    config.on_epoch = [&](int epoch, double loss) {
      if (epoch % a.log_every == 0 || epoch == a.epochs) {
        err << "epoch " << epoch << " mean_loss " << exact(loss) << '\n';
      }
    };
  }

  ModelParams init = init_params(data.dim(), a.hidden, *a.seed);
  TrainResult result = train(std::move(init), data, config);
  save_checkpoint(result.params, a.out);
  const std::string log_path = a.loss_log.empty() ? a.out + ".loss.csv" : a.loss_log;
  write_loss_log(result.epoch_losses, log_path);
  out << "wrote " << a.out << " and " << log_path << '\n';
  return kOk;
}

// ---- encode --------------------------------------------------------------

struct EncodeArgs {
  std::string manifest;
  std::string out;
  EncoderChoice encoder;
  SplitChoice split;
};

int cmd_encode(const EncodeArgs& a, std::ostream& out) {
  const Dataset data = a.split.apply(parse_manifest(a.manifest));
  if (data.empty()) throw Error("no records in the selected split");
  const EmbeddingArchive archive = build_archive(a.encoder.make(data.dim()), data);
  write_archive(archive, a.out);
  out << "wrote " << archive.size() << " embeddings of width " << archive.dim() << " to "
      << a.out << '\n';
  return kOk;
}

// ---- search --------------------------------------------------------------

struct SearchArgs {
  std::string archive;
  std::string manifest;
  std::string query_id;
  std::string query_features;
  std::string method = "cosine";
  std::size_t top = 10;
  bool dtw_normalize = false;
  EncoderChoice encoder;
  SplitChoice split;
};

void print_ranking(const RankedResult& ranked,
                   const std::function<std::string(const std::string&)>& word_of,
                   std::ostream& out) {
  out << "rank,id,word,score\n";
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    out << (k + 1) << ',' << ranked[k].id << ',' << word_of(ranked[k].id) << ','
        << exact(ranked[k].score) << '\n';
  }
}

int cmd_search(const SearchArgs& a, std::ostream& out) {
  if (a.query_id.empty() == a.query_features.empty()) {
    throw UsageError("give exactly one of --query-id and --query-features");
  }
  RankOptions options;
  options.top_k = a.top;
  if (!a.query_id.empty()) options.exclude_id = a.query_id;

  if (a.method == "dtw") {
    if (a.manifest.empty()) throw UsageError("--method dtw needs --manifest");
    const Dataset data = a.split.apply(parse_manifest(a.manifest));
    std::optional<FeatureSequence> query;
    if (!a.query_id.empty()) {
      const SegmentRecord* r = data.find(a.query_id);
      if (r == nullptr) throw Error("unknown query id '" + a.query_id + "'");
      query = r->features;
    } else {
      query = read_features(a.query_features);
    }
    const auto ranked = rank_dtw(*query, data, options, {a.dtw_normalize});
    print_ranking(ranked, [&](const std::string& id) { return data.find(id)->word; }, out);
    return kOk;
  }

  std::optional<EmbeddingArchive> archive;
  if (!a.archive.empty()) {
    archive = read_archive(a.archive);
  } else {
    if (a.manifest.empty() || !a.encoder.chosen()) {
      throw UsageError("give --archive, or --manifest with --checkpoint or --encoder ne");
    }
    const Dataset data = a.split.apply(parse_manifest(a.manifest));
    archive = build_archive(a.encoder.make(data.dim()), data);
  }

  Vector query;
  if (!a.query_id.empty()) {
    const ArchiveEntry* e = archive->find(a.query_id);
    if (e == nullptr) throw Error("unknown query id '" + a.query_id + "'");
    query = e->embedding;
  } else {
    if (!a.encoder.chosen()) {
      throw UsageError("--query-features needs --checkpoint or --encoder ne to embed the query");
    }
    const FeatureSequence features = read_features(a.query_features);
    query = a.encoder.make(features.dim()).encode(features);
  }
  const auto ranked = rank(query, *archive, options);
  print_ranking(ranked, [&](const std::string& id) { return archive->find(id)->word; }, out);
  return kOk;
}

// ---- evaluate ------------------------------------------------------------

struct EvaluateArgs {
  std::string manifest;
  std::vector<std::string> methods;
  SplitChoice split;
  std::string report;
  std::string report_dir;
  std::string comparison;
  bool dtw_normalize = false;
};

struct Method {
  std::string label;
  enum class Kind { kCheckpoint, kNaive, kDtw } kind;
  std::string checkpoint;
  int segments = 0;
};

// "dtw", "ne<m>", or "<label>=<checkpoint path>".
Method parse_method(const std::string& spec) {
  if (spec == "dtw") return {spec, Method::Kind::kDtw, {}, 0};
  if (spec.size() > 2 && spec.starts_with("ne") &&
      spec.find_first_not_of("0123456789", 2) == std::string::npos) {
    const int m = std::stoi(spec.substr(2));
    if (m < 1) throw UsageError("naive encoder needs m >= 1");
    return {spec, Method::Kind::kNaive, {}, m};
  }
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw UsageError("method '" + spec + "' is not dtw, ne<m>, or label=checkpoint");
  }
  return {spec.substr(0, eq), Method::Kind::kCheckpoint, spec.substr(eq + 1), 0};
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.methods.empty()) throw UsageError("at least one --method is required");
  if (!a.report.empty() && a.methods.size() != 1) {
    throw UsageError("--report takes a single method; use --report-dir for several");
  }
  std::vector<Method> methods;
  for (const auto& spec : a.methods) methods.push_back(parse_method(spec));

  const Dataset data = a.split.apply(parse_manifest(a.manifest));
  if (data.empty()) throw Error("evaluation split is empty");

  struct Row {
    std::string label;
    MapReport report;
  };
  std::vector<Row> rows;
  for (const auto& m : methods) {
    MapReport report;
    switch (m.kind) {
      case Method::Kind::kDtw:
        report = mean_average_precision_dtw(data, {a.dtw_normalize});
        break;
      case Method::Kind::kNaive:
        report = mean_average_precision(build_archive(naive_encoder(data.dim(), m.segments), data));
        break;
      case Method::Kind::kCheckpoint: {
        ModelParams params = load_checkpoint(m.checkpoint);
        if (params.input_dim != data.dim()) {
          throw DimensionError("checkpoint '" + m.checkpoint + "' expects " +
                               std::to_string(params.input_dim) + "-dimensional features");
        }
        report = mean_average_precision(
            build_archive(autoencoder_encoder(std::move(params)), data));
        break;
      }
    }
    if (!report.map) {
      err << "no scorable queries: every word in the split occurs only once\n";
      return kDataError;
    }
    rows.push_back({m.label, std::move(report)});
  }

  if (!a.report_dir.empty()) fs::create_directories(a.report_dir);
  for (const auto& row : rows) {
    out << "method=" << row.label << " map=" << exact(*row.report.map)
        << " scored=" << row.report.scored << " excluded=" << row.report.excluded << '\n';
    if (!a.report.empty()) write_query_report(row.report, a.report);
    if (!a.report_dir.empty()) {
      write_query_report(row.report, fs::path(a.report_dir) / (row.label + ".queries.csv"));
    }
  }
  if (!a.comparison.empty()) {
    std::ofstream csv_out(a.comparison, std::ios::binary);
    if (!csv_out) throw IngestionError("cannot write " + a.comparison);
    csv_out << "method,map,scored,excluded\n";
    for (const auto& row : rows) {
      csv_out << row.label << ',' << exact(*row.report.map) << ',' << row.report.scored << ','
              << row.report.excluded << '\n';
    }
  }
  return kOk;
}

// ---- analyze -------------------------------------------------------------

struct AnalyzeArgs {
  std::string archive;
  std::string manifest;
  std::string out;
  std::size_t open_bucket = 5;
  std::string pairs;
};

// Writes to --out when given, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw IngestionError("cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

int cmd_edit_distance(const AnalyzeArgs& a, std::ostream& out) {
  const EmbeddingArchive archive = read_archive(a.archive);
  const Dataset data = parse_manifest(a.manifest);
  const SimilarityTable table = similarity_table(archive, data, a.open_bucket);
  Sink sink(a.out, out);
  sink.get() << "edit_distance,pair_count,mean_cosine\n";
  for (const auto& b : table.buckets) {
    sink.get() << b.label << ',' << b.pair_count << ','
               << (b.pair_count ? exact(b.mean_cosine) : std::string()) << '\n';
  }
  return kOk;
}

std::vector<std::pair<std::string, std::string>> parse_pairs(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (auto item : csv::split(text)) {
    item = csv::trim(item);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == item.size()) {
      throw UsageError("pair '" + std::string(item) + "' is not of the form word1:word2");
    }
    pairs.emplace_back(std::string(item.substr(0, colon)), std::string(item.substr(colon + 1)));
  }
  return pairs;
}

int cmd_diff_vectors(const AnalyzeArgs& a, std::ostream& out) {
  const EmbeddingArchive archive = read_archive(a.archive);
  const auto pairs = parse_pairs(a.pairs);
  const auto diffs = word_difference_vectors(archive, pairs);
  std::optional<Matrix> projected;
  if (diffs.size() >= 2) projected = project_2d(diffs);

  Sink sink(a.out, out);
  std::ostream& s = sink.get();
  s << "pair";
  for (Index k = 0; k < archive.dim(); ++k) s << ",dx" << k;
  s << ",proj_x,proj_y\n";
  for (std::size_t p = 0; p < diffs.size(); ++p) {
    s << pairs[p].first << ':' << pairs[p].second;
    for (Index k = 0; k < diffs[p].size(); ++k) s << ',' << exact(diffs[p][k]);
    if (projected) {
      s << ',' << exact((*projected)(p, 0)) << ',' << exact((*projected)(p, 1)) << '\n';
    } else {
      s << ",,\n";
    }
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequence-to-sequence autoencoder embeddings for query-by-example search"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic phoneme-string corpus");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--alphabet", synth.config.alphabet_size)->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  synth_cmd->add_option("--words", synth.config.num_words)->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--tokens", synth.config.tokens_per_word)->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--test-tokens", synth.test_tokens,
                        "Tokens per word assigned to test (default: a third)");
  synth_cmd->add_option("--phonemes", synth.phonemes, "MIN,MAX phonemes per word")
      ->delimiter(',')->expected(2);
  synth_cmd->add_option("--frames", synth.frames, "MIN,MAX frames per phoneme")
      ->delimiter(',')->expected(2);
  synth_cmd->add_option("--dim", synth.config.dim)->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.config.noise_sigma)->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.config.seed)->capture_default_str();
  synth_cmd->add_option("--format", synth.format)->check(CLI::IsMember({"csv", "bin"}))
      ->capture_default_str();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train an SA or DSA model");
  train_cmd->add_option("--manifest", train_args.manifest)->required();
  train_cmd->add_option("--out", train_args.out, "Checkpoint path")->required();
  train_cmd->add_option("--mode", train_args.mode)->check(CLI::IsMember({"sa", "dsa"}))
      ->capture_default_str();
  train_cmd->add_option("--seed", train_args.seed)->required();
  train_cmd->add_option("--hidden", train_args.hidden)->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--lr", train_args.lr)->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train_cmd->add_option("--epochs", train_args.epochs)->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train_cmd->add_option("--denoise", train_args.denoise,
                        "Masking probability (default 0 for sa, 0.3 for dsa)")
      ->check(CLI::Range(0.0, 1.0));
  auto* clip_opt = train_cmd->add_option("--clip-norm", train_args.clip_norm)
                       ->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_flag("--no-clip", train_args.no_clip, "Disable gradient clipping")
      ->excludes(clip_opt);
  train_cmd->add_option("--loss-log", train_args.loss_log, "Default: <out>.loss.csv");
  train_cmd->add_option("--log-every", train_args.log_every, "Progress interval; 0 silences")
      ->capture_default_str();

  EncodeArgs encode_args;
  auto* encode_cmd = app.add_subcommand("encode", "Write an embedding archive");
  encode_cmd->add_option("--manifest", encode_args.manifest)->required();
  encode_cmd->add_option("--out", encode_args.out)->required();
  encode_args.encoder.add_options(encode_cmd);
  add_split_option(encode_cmd, encode_args.split);

  SearchArgs search;
  auto* search_cmd = app.add_subcommand("search", "Rank archive segments against a query");
  search_cmd->add_option("--archive", search.archive);
  search_cmd->add_option("--manifest", search.manifest);
  search_cmd->add_option("--query-id", search.query_id);
  search_cmd->add_option("--query-features", search.query_features);
  search_cmd->add_option("--method", search.method)->check(CLI::IsMember({"cosine", "dtw"}))
      ->capture_default_str();
  search_cmd->add_option("--top", search.top)->check(CLI::PositiveNumber)->capture_default_str();
  search_cmd->add_flag("--dtw-normalize", search.dtw_normalize);
  search.encoder.add_options(search_cmd);
  add_split_option(search_cmd, search.split);

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Mean average precision per method");
  eval_cmd->add_option("--manifest", eval_args.manifest)->required();
  eval_cmd->add_option("--method", eval_args.methods,
                       "dtw, ne<m>, or label=checkpoint; repeatable")
      ->required();
  eval_cmd->add_option("--report", eval_args.report, "Per-query CSV (single method)");
  eval_cmd->add_option("--report-dir", eval_args.report_dir, "Per-query CSV per method");
  eval_cmd->add_option("--comparison", eval_args.comparison, "One row per method");
  eval_cmd->add_flag("--dtw-normalize", eval_args.dtw_normalize);
  add_split_option(eval_cmd, eval_args.split);

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Embedding-space analyses");
  analyze_cmd->require_subcommand(1);
  auto* ed_cmd = analyze_cmd->add_subcommand("edit-distance",
                                             "Mean cosine by phoneme edit distance");
  ed_cmd->add_option("--archive", analyze.archive)->required();
  ed_cmd->add_option("--manifest", analyze.manifest)->required();
  ed_cmd->add_option("--open-bucket", analyze.open_bucket, "First pooled distance")
      ->check(CLI::PositiveNumber)->capture_default_str();
  ed_cmd->add_option("--out", analyze.out);
  auto* dv_cmd = analyze_cmd->add_subcommand("diff-vectors",
                                             "Word-mean difference vectors and 2-D projection");
  dv_cmd->add_option("--archive", analyze.archive)->required();
  dv_cmd->add_option("--pairs", analyze.pairs, "w1:w2,w3:w4,...")->required();
  dv_cmd->add_option("--out", analyze.out);

  std::vector<const char*> argv{"aw2v"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, out);
    if (*train_cmd) return cmd_train(train_args, out, err);
    if (*encode_cmd) return cmd_encode(encode_args, out);
    if (*search_cmd) return cmd_search(search, out);
    if (*eval_cmd) return cmd_evaluate(eval_args, out, err);
    if (*ed_cmd) return cmd_edit_distance(analyze, out);
    if (*dv_cmd) return cmd_diff_vectors(analyze, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace aw2v::cli

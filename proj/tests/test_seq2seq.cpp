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

#include <algorithm>
#include <numeric>
#include <random>

#include "aw2v/errors.hpp"
#include "aw2v/seq2seq.hpp"
#include "doctest.h"
#include "support/testing.hpp"

using namespace aw2v;
using aw2v::testing::random_matrix;
using aw2v::testing::random_vector;
using aw2v::testing::randomize;
using aw2v::testing::TempDir;

namespace {

Dataset single_sequence_dataset(const Matrix& frames) {
  Dataset d;
  d.add({.id = "only", .word = "w", .phonemes = {}, .split = Split::kTrain,
         .features = FeatureSequence(frames)});
  return d;
}

Dataset small_corpus(std::uint64_t seed) {
  SyntheticConfig c;
  c.alphabet_size = 4;
  c.num_words = 5;
  c.tokens_per_word = 4;
  c.test_tokens_per_word = 1;
  c.phonemes_per_word = {2, 3};
  c.dim = 3;
  c.frames_per_phoneme = {1, 2};
  c.noise_sigma = 0.05;
  c.seed = seed;
  return generate_synthetic(c);
}

}  // namespace

TEST_CASE("init_params is seeded and bounded") {
  const ModelParams a = init_params(3, 5, 42);
  const ModelParams b = init_params(3, 5, 42);
  const ModelParams c = init_params(3, 5, 43);
  CHECK(same_weights(a, b));
  CHECK_FALSE(same_weights(a, c));
  visit_tensors(a, [](std::string_view name, const auto& t) {
    CAPTURE(std::string(name));
    CHECK(t.cwiseAbs().maxCoeff() <= 0.08);
    const auto leaf = name.substr(name.rfind('.') + 1);
    if (leaf.starts_with("b_") || name == "output.b") {
      CHECK(t.isZero(0.0));
    } else if (t.size() > 4) {
      CHECK_FALSE(t.isZero(0.0));
    }
  });
}

TEST_CASE("parameter count matches the closed-form shape sum") {
  const Index input = 13, hidden = 100;
  // encoder: 4 input blocks, 4 recurrent blocks, 3 peepholes, 4 biases
  const Index encoder = 4 * hidden * input + 4 * hidden * hidden + 3 * hidden + 4 * hidden;
  // decoder adds the z-projection (4 blocks of hidden x hidden)
  const Index decoder = 4 * hidden * hidden + encoder;
  const Index output = input * hidden + input;
  CHECK(encoder + decoder + output == 133113);
  CHECK(init_params(input, hidden, 0).parameter_count() == 133113u);
}

TEST_CASE("encode with zero weights gives a zero embedding") {
  const ModelParams p = ModelParams::zeros(3, 4);
  std::mt19937_64 rng(1);
  const Vector z = encode(p, FeatureSequence(random_matrix(7, 3, rng)));
  CHECK(z.size() == 4);
  CHECK(z.isZero(0.0));
}

TEST_CASE("encode is deterministic and a single frame is one cell step") {
  std::mt19937_64 rng(2);
  ModelParams p = ModelParams::zeros(3, 4);
  randomize(p, rng, 0.5);
  const FeatureSequence x(random_matrix(5, 3, rng));
  CHECK(encode(p, x) == encode(p, x));
  const FeatureSequence one(random_matrix(1, 3, rng));
  const LstmStep step = cell_forward(p.encoder, one.frame(0), LstmState::zeros(4));
  CHECK(encode(p, one) == step.h);
}

TEST_CASE("embedding width is independent of sequence length") {
  std::mt19937_64 rng(3);
  const ModelParams p = init_params(2, 6, 3);
  std::uniform_int_distribution<int> length(1, 50);
  for (int trial = 0; trial < 30; ++trial) {
    const Vector z = encode(p, FeatureSequence(random_matrix(length(rng), 2, rng)));
    CHECK(z.size() == 6);
    CHECK(z.allFinite());
  }
}

TEST_CASE("encode rejects a width mismatch") {
  const ModelParams p = init_params(3, 4, 0);
  CHECK_THROWS_AS(encode(p, FeatureSequence(Matrix::Ones(2, 2))), DimensionError);
}

TEST_CASE("decode with zero weights emits the output bias") {
  ModelParams p = ModelParams::zeros(3, 4);
  p.output_b << 0.5, -1.0, 2.0;
  const Matrix y = decode(p, Vector::Ones(4), 6);
  REQUIRE(y.rows() == 6);
  for (Index t = 0; t < 6; ++t) CHECK(y.row(t).transpose() == p.output_b);
  CHECK(decode(p, Vector::Ones(4), 1).rows() == 1);
  CHECK_THROWS_AS(decode(p, Vector::Ones(4), 0), DimensionError);
}

TEST_CASE("decode matches a hand-unrolled three-step composition") {
  std::mt19937_64 rng(4);
  ModelParams p = ModelParams::zeros(2, 3);
  randomize(p, rng, 0.7);
  const Vector z = random_vector(3, rng);

  const LstmStep s1 = cell_forward(p.decoder, p.decoder_z, z, LstmState::zeros(3));
  const Vector y1 = p.output_w * s1.h + p.output_b;
  const LstmStep s2 = cell_forward(p.decoder, p.decoder.input, y1, s1.state());
  const Vector y2 = p.output_w * s2.h + p.output_b;
  const LstmStep s3 = cell_forward(p.decoder, p.decoder.input, y2, s2.state());
  const Vector y3 = p.output_w * s3.h + p.output_b;

  const Matrix y = decode(p, z, 3);
  CHECK(y.row(0).transpose() == y1);
  CHECK(y.row(1).transpose() == y2);
  CHECK(y.row(2).transpose() == y3);
}

TEST_CASE("reconstruction loss is the summed squared error") {
  Matrix x(1, 2);
  x << 1, 2;
  CHECK(reconstruction_loss(x, Matrix::Zero(1, 2)) == 5.0);
  std::mt19937_64 rng(5);
  const Matrix a = random_matrix(4, 3, rng);
  CHECK(reconstruction_loss(a, a) == 0.0);

  const Matrix b = random_matrix(4, 3, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(3);
  perm.indices() << 2, 0, 1;
  CHECK(reconstruction_loss(a * perm, b * perm) ==
        doctest::Approx(reconstruction_loss(a, b)).epsilon(1e-14));
  CHECK_THROWS_AS(reconstruction_loss(a, Matrix::Zero(3, 3)), DimensionError);
  CHECK_THROWS_AS(reconstruction_loss(a, Matrix::Zero(4, 2)), DimensionError);
}

TEST_CASE("zero masking honours its probability") {
  std::mt19937_64 rng(6);
  const Matrix x = Matrix::Constant(4, 5, 3.0);
  CHECK(corrupt_zero_mask(x, 0.0, rng) == x);
  CHECK(corrupt_zero_mask(x, 1.0, rng).isZero(0.0));
  CHECK_THROWS_AS(corrupt_zero_mask(x, 1.5, rng), Error);

  const Matrix big = Matrix::Ones(1000, 100);
  const Matrix masked = corrupt_zero_mask(big, 0.3, rng);
  const double zeroed = static_cast<double>((masked.array() == 0.0).count()) / big.size();
  CHECK(std::abs(zeroed - 0.3) <= 0.01);

  // Each call draws a fresh mask.
  CHECK_FALSE(corrupt_zero_mask(big, 0.3, rng) == masked);
}

TEST_CASE("end-to-end gradient matches central differences") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 6; ++trial) {
    const Index length = 1 + trial % 4;
    ModelParams p = ModelParams::zeros(3, 4);
    randomize(p, rng, 0.5);
    const Matrix x = random_matrix(length, 3, rng);
    const auto report = aw2v::testing::check_model_gradient(p, x, x);
    CAPTURE(report.first_failure);
    CHECK(report.checked == p.parameter_count());
    CHECK(report.failures == 0);
  }
}

TEST_CASE("denoising gradient uses the clean target") {
  std::mt19937_64 rng(77);
  ModelParams p = ModelParams::zeros(3, 4);
  randomize(p, rng, 0.5);
  const Matrix clean = random_matrix(4, 3, rng);
  const Matrix noisy = corrupt_zero_mask(clean, 0.4, rng);
  const auto report = aw2v::testing::check_model_gradient(p, noisy, clean);
  CAPTURE(report.first_failure);
  CHECK(report.failures == 0);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  const Dataset d = small_corpus(1);
  const ModelParams init = init_params(3, 4, 9);
  TrainConfig config;
  config.learning_rate = 0.0;
  config.epochs = 3;
  config.seed = 1;
  const TrainResult r = train(init, d, config);
  CHECK(same_weights(r.params, init));
  CHECK(r.params.epochs == 3);
  CHECK(r.epoch_losses.size() == 3);
}

TEST_CASE("one small SGD step reduces the loss") {
  std::mt19937_64 rng(10);
  const Matrix x = random_matrix(5, 3, rng);
  const Dataset d = single_sequence_dataset(x);
  const ModelParams init = init_params(3, 2, 10);
  TrainConfig config;
  config.learning_rate = 1e-3;
  config.epochs = 1;
  config.clip_norm.reset();
  const TrainResult r = train(init, d, config);
  const double before = reconstruction_loss(x, decode(init, encode(init, FeatureSequence(x)), 5));
  const double after =
      reconstruction_loss(x, decode(r.params, encode(r.params, FeatureSequence(x)), 5));
  CHECK(r.epoch_losses.front() == doctest::Approx(before).epsilon(1e-14));
  CHECK(after < before);
}

TEST_CASE("training is bit-reproducible and denoise 0 is plain SA") {
  const Dataset d = small_corpus(2);
  TrainConfig config;
  config.learning_rate = 0.05;
  config.epochs = 4;
  config.seed = 17;
  const TrainResult a = train(init_params(3, 5, 17), d, config);
  const TrainResult b = train(init_params(3, 5, 17), d, config);
  CHECK(checkpoint_json(a.params) == checkpoint_json(b.params));
  CHECK(a.epoch_losses == b.epoch_losses);

  TrainConfig dsa = config;
  dsa.denoise_p = 0.3;
  const TrainResult c = train(init_params(3, 5, 17), d, dsa);
  CHECK_FALSE(same_weights(a.params, c.params));
  CHECK(c.params.training.denoise_p == 0.3);
}

TEST_CASE("training reduces the loss on a small synthetic corpus") {
  const Dataset d = small_corpus(3);
  TrainConfig config;
  config.epochs = 80;
  config.seed = 3;
  const TrainResult r = train(init_params(3, 8, 3), d, config);
  const auto& l = r.epoch_losses;
  REQUIRE(l.size() == 80);
  const double head = std::accumulate(l.begin(), l.begin() + 10, 0.0) / 10;
  const double tail = std::accumulate(l.end() - 10, l.end(), 0.0) / 10;
  CAPTURE(head);
  CAPTURE(tail);
  CHECK(tail < 0.5 * head);
  CHECK(l.back() < l.front());
}

TEST_CASE("a runaway learning rate raises a divergence error") {
  const Dataset d = small_corpus(4);
  TrainConfig config;
  config.learning_rate = 1e200;
  config.epochs = 5;
  config.clip_norm.reset();
  CHECK_THROWS_AS(train(init_params(3, 4, 0), d, config), DivergenceError);
}

TEST_CASE("training rejects an empty train split and bad settings") {
  Dataset test_only;
  test_only.add({.id = "t", .word = "w", .phonemes = {}, .split = Split::kTest,
                 .features = FeatureSequence(Matrix::Ones(2, 3))});
  CHECK_THROWS_AS(train(init_params(3, 2, 0), test_only, {}), Error);
  TrainConfig bad;
  bad.denoise_p = 2.0;
  CHECK_THROWS_AS(train(init_params(3, 2, 0), small_corpus(1), bad), Error);
  CHECK_THROWS_AS(train(init_params(2, 2, 0), small_corpus(1), {}), DimensionError);
}

TEST_CASE("checkpoint round-trip is exact") {
  TempDir dir;
  std::mt19937_64 rng(11);
  ModelParams p = init_params(3, 4, 11);
  randomize(p, rng, 1.0 / 3.0);
  p.epochs = 7;
  p.training = {0.3, 0.3, std::nullopt};
  save_checkpoint(p, dir / "m.ckpt");
  const ModelParams q = load_checkpoint(dir / "m.ckpt");
  CHECK(same_weights(p, q));
  CHECK(q.epochs == 7);
  CHECK(q.seed == 11);
  CHECK(q.training == p.training);
  const FeatureSequence x(random_matrix(6, 3, rng));
  CHECK(encode(p, x) == encode(q, x));
  CHECK(checkpoint_json(q) == aw2v::testing::slurp(dir / "m.ckpt"));
}

TEST_CASE("damaged checkpoints fail to load") {
  TempDir dir;
  const ModelParams p = init_params(2, 3, 1);
  const std::string text = checkpoint_json(p);

  aw2v::testing::spit(dir / "trunc", text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_checkpoint(dir / "trunc"), FormatError);

  std::string v2 = text;
  v2.replace(v2.find("\"version\":1"), 11, "\"version\":2");
  CHECK_THROWS_AS(checkpoint_from_json(v2), FormatError);

  std::string shape = text;
  shape.replace(shape.find("\"hidden_dim\":3"), 14, "\"hidden_dim\":4");
  CHECK_THROWS_AS(checkpoint_from_json(shape), FormatError);

  CHECK_THROWS_AS(load_checkpoint(dir / "missing"), IngestionError);
}

TEST_CASE("checkpoint records provenance") {
  TrainConfig config;
  config.learning_rate = 0.1;
  config.epochs = 2;
  config.denoise_p = 0.3;
  config.seed = 5;
  const TrainResult r = train(init_params(3, 3, 5), small_corpus(5), config);
  const std::string text = checkpoint_json(r.params);
  CHECK(text.find("\"epochs\":2") != std::string::npos);
  CHECK(text.find("\"denoise_p\":0.3") != std::string::npos);
  CHECK(text.find("\"learning_rate\":0.1") != std::string::npos);
  CHECK(text.find("\"clip_norm\":5.0") != std::string::npos);
  CHECK(text.find("\"decoder.W_z.W_xi\"") != std::string::npos);
  CHECK(text.find("\"output.W\"") != std::string::npos);
}

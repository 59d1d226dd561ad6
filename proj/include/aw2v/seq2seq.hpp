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

#ifndef AW2V_SEQ2SEQ_HPP_
#define AW2V_SEQ2SEQ_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "aw2v/data.hpp"
#include "aw2v/lstm.hpp"
#include "aw2v/types.hpp"

namespace aw2v {

// Hyperparameters of the run that produced a set of weights.
struct TrainingProvenance {
  double learning_rate = 0.0;
  double denoise_p = 0.0;
  std::optional<double> clip_norm;

  friend bool operator==(const TrainingProvenance&, const TrainingProvenance&) = default;
};

// Sequence-to-sequence autoencoder weights.
//
// The encoder reads x_1..x_T from a zero state; its last hidden state is the
// embedding z. The decoder starts from a zero state, takes z as its first
// input through `decoder_z` and its own previous output y_{t-1} through
// `decoder.input` afterwards. y_t = output_w h_t + output_b.
struct ModelParams {
  Index input_dim = 0;
  Index hidden_dim = 0;
  LstmParams encoder;
  LstmParams decoder;
  GateWeights decoder_z;
  Matrix output_w;  // D x d
  Vector output_b;  // D
  std::uint64_t seed = 0;
  int epochs = 0;
  TrainingProvenance training;

  static ModelParams zeros(Index input_dim, Index hidden_dim);
  void check_shapes() const;
  std::size_t parameter_count() const;
  void set_zero();
};

// Weights only; provenance is ignored.
bool same_weights(const ModelParams& a, const ModelParams& b);

// Visits every trainable tensor with its checkpoint name. `fn` receives
// (std::string_view name, T& tensor) where T is Matrix or Vector (const for a
// const model).
template <typename Params, typename Fn>
void visit_tensors(Params& p, Fn&& fn) {
  auto gates = [&](std::string_view prefix, auto& g) {
    const std::string pre(prefix);
    fn(pre + "W_xi", g.i);
    fn(pre + "W_xf", g.f);
    fn(pre + "W_xc", g.c);
    fn(pre + "W_xo", g.o);
  };
  auto core = [&](std::string_view prefix, auto& l) {
    const std::string pre(prefix);
    fn(pre + "W_hi", l.recurrent.i);
    fn(pre + "W_hf", l.recurrent.f);
    fn(pre + "W_hc", l.recurrent.c);
    fn(pre + "W_ho", l.recurrent.o);
    fn(pre + "w_ci", l.peep_i);
    fn(pre + "w_cf", l.peep_f);
    fn(pre + "w_co", l.peep_o);
    fn(pre + "b_i", l.bias_i);
    fn(pre + "b_f", l.bias_f);
    fn(pre + "b_c", l.bias_c);
    fn(pre + "b_o", l.bias_o);
  };
  gates("encoder.", p.encoder.input);
  core("encoder.", p.encoder);
  gates("decoder.W_z.", p.decoder_z);
  gates("decoder.W_y.", p.decoder.input);
  core("decoder.", p.decoder);
  fn(std::string("output.W"), p.output_w);
  fn(std::string("output.b"), p.output_b);
}

// Weights uniform in [-0.08, 0.08], biases zero.
ModelParams init_params(Index input_dim, Index hidden_dim, std::uint64_t seed);

// Runs the encoder from a zero state and returns h_T.
Vector encode(const ModelParams& params, const FeatureSequence& x);

// Generates `length` frames from z, feeding each output back as the next input.
Matrix decode(const ModelParams& params, const Vector& z, Index length);

// Sum over t of ||x_t - y_t||^2.
double reconstruction_loss(const Matrix& x, const Matrix& y);
double reconstruction_loss(const FeatureSequence& x, const FeatureSequence& y);

// Each element independently zeroed with probability p.
Matrix corrupt_zero_mask(const Matrix& x, double p, std::mt19937_64& rng);

// Loss of reconstructing `target` from `input`, with its exact gradient added
// into `grad` (which must have the model's shapes). Gradients flow through
// every decoder feedback edge, the z handoff, and the encoder.
double loss_and_gradient(const ModelParams& params, const Matrix& input,
                         const Matrix& target, ModelParams& grad);

struct TrainConfig {
  double learning_rate = 0.3;
  int epochs = 500;
  double denoise_p = 0.0;
  std::optional<double> clip_norm = 5.0;
  std::uint64_t seed = 0;
  // Called after each epoch with (epoch, mean loss); 1-based epoch.
  std::function<void(int, double)> on_epoch;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_losses;
};

// Per-sequence SGD over the train split of `dataset`. Throws DivergenceError
// on a non-finite loss or gradient.
TrainResult train(ModelParams params, const Dataset& dataset, const TrainConfig& config);

// Checkpoint file: one JSON object with every tensor under its visit_tensors
// name. Load throws FormatError on any mismatch.
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);
std::string checkpoint_json(const ModelParams& params);
ModelParams checkpoint_from_json(std::string_view text);

void write_loss_log(const std::vector<double>& losses, const std::filesystem::path& path);

}  // namespace aw2v

#endif  // AW2V_SEQ2SEQ_HPP_

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

#include "aw2v/seq2seq.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <span>

#include "aw2v/csv.hpp"
#include "aw2v/errors.hpp"

namespace aw2v {

namespace {

template <typename Params>
std::vector<std::span<double>> tensor_spans(Params& p) {
  std::vector<std::span<double>> out;
  visit_tensors(p, [&](std::string_view, auto& t) {
    out.emplace_back(t.data(), static_cast<std::size_t>(t.size()));
  });
  return out;
}

std::vector<std::span<const double>> tensor_spans(const ModelParams& p) {
  std::vector<std::span<const double>> out;
  visit_tensors(p, [&](std::string_view, const auto& t) {
    out.emplace_back(t.data(), static_cast<std::size_t>(t.size()));
  });
  return out;
}

void check_input(const ModelParams& params, Index width, const char* what) {
  if (width != params.input_dim) {
    throw DimensionError(std::string(what) + " has dimension " + std::to_string(width) +
                         ", model expects " + std::to_string(params.input_dim));
  }
}

}  // namespace

ModelParams ModelParams::zeros(Index input_dim, Index hidden_dim) {
  ModelParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.encoder = LstmParams::zeros(input_dim, hidden_dim);
  p.decoder = LstmParams::zeros(input_dim, hidden_dim);
  p.decoder_z = GateWeights::zeros(hidden_dim, hidden_dim);
  p.output_w = Matrix::Zero(input_dim, hidden_dim);
  p.output_b = Vector::Zero(input_dim);
  return p;
}

void ModelParams::check_shapes() const {
  if (input_dim < 1 || hidden_dim < 1) throw DimensionError("model dimensions must be >= 1");
  encoder.check_shapes();
  decoder.check_shapes();
  if (encoder.input_dim() != input_dim || decoder.input_dim() != input_dim) {
    throw DimensionError("encoder/decoder input width differs from input_dim");
  }
  if (encoder.hidden_dim() != hidden_dim || decoder.hidden_dim() != hidden_dim) {
    throw DimensionError("encoder/decoder hidden width differs from hidden_dim");
  }
  for (const Matrix* m : {&decoder_z.i, &decoder_z.f, &decoder_z.c, &decoder_z.o}) {
    if (m->rows() != hidden_dim || m->cols() != hidden_dim) {
      throw DimensionError("decoder z-projection must be hidden_dim x hidden_dim");
    }
  }
  if (output_w.rows() != input_dim || output_w.cols() != hidden_dim ||
      output_b.size() != input_dim) {
    throw DimensionError("output layer shape mismatch");
  }
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  visit_tensors(*this, [&](std::string_view, const auto& t) { n += t.size(); });
  return n;
}

void ModelParams::set_zero() {
  visit_tensors(*this, [](std::string_view, auto& t) { t.setZero(); });
}

bool same_weights(const ModelParams& a, const ModelParams& b) {
  if (a.input_dim != b.input_dim || a.hidden_dim != b.hidden_dim) return false;
  auto sa = tensor_spans(a);
  auto sb = tensor_spans(b);
  for (std::size_t k = 0; k < sa.size(); ++k) {
    if (!std::equal(sa[k].begin(), sa[k].end(), sb[k].begin(), sb[k].end())) return false;
  }
  return true;
}

ModelParams init_params(Index input_dim, Index hidden_dim, std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1) throw DimensionError("model dimensions must be >= 1");
  ModelParams p = ModelParams::zeros(input_dim, hidden_dim);
  p.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(-0.08, 0.08);
  visit_tensors(p, [&](std::string_view name, auto& t) {
    // Biases stay zero; everything else (including peepholes) is drawn.
    const auto leaf = name.substr(name.rfind('.') + 1);
    if (leaf.starts_with("b_") || name == "output.b") return;
    for (Index k = 0; k < t.size(); ++k) t.data()[k] = weight(rng);
  });
  return p;
}

Vector encode(const ModelParams& params, const FeatureSequence& x) {
  check_input(params, x.dim(), "input sequence");
  LstmState state = LstmState::zeros(params.hidden_dim);
  for (Index t = 0; t < x.length(); ++t) {
    state = cell_forward(params.encoder, x.frame(t), state).state();
  }
  return state.h;
}

Matrix decode(const ModelParams& params, const Vector& z, Index length) {
  if (length < 1) throw DimensionError("decode length must be >= 1");
  if (z.size() != params.hidden_dim) throw DimensionError("embedding width mismatch");
  Matrix y(length, params.input_dim);
  LstmState state = LstmState::zeros(params.hidden_dim);
  Vector prev_out;
  for (Index t = 0; t < length; ++t) {
    const LstmStep step = t == 0
                              ? cell_forward(params.decoder, params.decoder_z, z, state)
                              : cell_forward(params.decoder, prev_out, state);
    prev_out = params.output_w * step.h + params.output_b;
    y.row(t) = prev_out.transpose();
    state = step.state();
  }
  return y;
}

double reconstruction_loss(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionError("reconstruction target and output differ in shape");
  }
  double loss = 0.0;
  for (Index t = 0; t < x.rows(); ++t) loss += (x.row(t) - y.row(t)).squaredNorm();
  return loss;
}

double reconstruction_loss(const FeatureSequence& x, const FeatureSequence& y) {
  return reconstruction_loss(x.frames(), y.frames());
}

Matrix corrupt_zero_mask(const Matrix& x, double p, std::mt19937_64& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error("masking probability must lie in [0, 1]");
  std::bernoulli_distribution wipe(p);
  Matrix out = x;
  for (Index t = 0; t < out.rows(); ++t) {
    for (Index k = 0; k < out.cols(); ++k) {
      if (wipe(rng)) out(t, k) = 0.0;
    }
  }
  return out;
}

double loss_and_gradient(const ModelParams& params, const Matrix& input,
                         const Matrix& target, ModelParams& grad) {
  check_input(params, input.cols(), "input sequence");
  check_input(params, target.cols(), "target sequence");
  if (input.rows() != target.rows() || input.rows() < 1) {
    throw DimensionError("input and target must have the same non-zero length");
  }
  const Index length = input.rows();
  const Index hidden = params.hidden_dim;

  LstmTape enc_tape;
  enc_tape.reserve(length);
  LstmState state = LstmState::zeros(hidden);
  for (Index t = 0; t < length; ++t) {
    enc_tape.push_back(cell_forward(params.encoder, input.row(t).transpose(), state));
    state = enc_tape.back().state();
  }
  const Vector z = state.h;

  LstmTape dec_tape;
  dec_tape.reserve(length);
  Matrix y(length, params.input_dim);
  state = LstmState::zeros(hidden);
  for (Index t = 0; t < length; ++t) {
    dec_tape.push_back(t == 0
                           ? cell_forward(params.decoder, params.decoder_z, z, state)
                           : cell_forward(params.decoder, y.row(t - 1).transpose(), state));
    state = dec_tape.back().state();
    y.row(t) = (params.output_w * state.h + params.output_b).transpose();
  }
  const double loss = reconstruction_loss(target, y);

  // Decoder, last step first. `feedback` is dL/dy_t arriving through the
  // input of step t+1.
  Vector feedback = Vector::Zero(params.input_dim);
  Vector dh = Vector::Zero(hidden);
  Vector dc = Vector::Zero(hidden);
  Vector dz;
  for (Index t = length - 1; t >= 0; --t) {
    const Vector dy = 2.0 * (y.row(t) - target.row(t)).transpose() + feedback;
    grad.output_w.noalias() += dy * dec_tape[t].h.transpose();
    grad.output_b += dy;
    dh += params.output_w.transpose() * dy;
    const bool first = t == 0;
    const CellGradients g =
        first ? cell_backward(params.decoder, params.decoder_z, dec_tape[t], dh, dc,
                              grad.decoder, grad.decoder_z)
              : cell_backward(params.decoder, dec_tape[t], dh, dc, grad.decoder);
    if (first) {
      dz = g.x;
    } else {
      feedback = g.x;
    }
    dh = g.h_prev;
    dc = g.c_prev;
  }

  dh = dz;
  dc = Vector::Zero(hidden);
  for (Index t = length - 1; t >= 0; --t) {
    const CellGradients g = cell_backward(params.encoder, enc_tape[t], dh, dc, grad.encoder);
    dh = g.h_prev;
    dc = g.c_prev;
  }
  return loss;
}

TrainResult train(ModelParams params, const Dataset& dataset, const TrainConfig& config) {
  params.check_shapes();
  if (config.epochs < 0) throw Error("epoch count must be >= 0");
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
    throw Error("learning rate must be finite and >= 0");
  }
  if (config.clip_norm && !(*config.clip_norm > 0.0)) throw Error("clip norm must be > 0");
  if (!(config.denoise_p >= 0.0 && config.denoise_p <= 1.0)) {
    throw Error("denoising probability must lie in [0, 1]");
  }

  std::vector<const SegmentRecord*> records;
  for (const auto& r : dataset.records()) {
    if (r.split == Split::kTrain) records.push_back(&r);
  }
  if (records.empty()) throw Error("training split is empty");
  check_input(params, dataset.dim(), "training data");

  // Shuffling and corruption draw from separate streams so that the masking
  // rate has no influence on the presentation order.
  std::mt19937_64 order_rng(config.seed);
  std::mt19937_64 mask_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  ModelParams grad = ModelParams::zeros(params.input_dim, params.hidden_dim);
  auto weights = tensor_spans(params);
  auto grads = tensor_spans(grad);

  TrainResult result;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(records.begin(), records.end(), order_rng);
    double total = 0.0;
    for (const SegmentRecord* r : records) {
      const Matrix& clean = r->features.frames();
      grad.set_zero();
      const double loss =
          config.denoise_p > 0.0
              ? loss_and_gradient(params, corrupt_zero_mask(clean, config.denoise_p, mask_rng),
                                  clean, grad)
              : loss_and_gradient(params, clean, clean, grad);

      double sq_norm = 0.0;
      for (auto g : grads) {
        for (double v : g) sq_norm += v * v;
      }
      if (!std::isfinite(loss) || !std::isfinite(sq_norm)) {
        throw DivergenceError(epoch, r->id, loss);
      }
      double scale = config.learning_rate;
      if (config.clip_norm) {
        const double norm = std::sqrt(sq_norm);
        if (norm > *config.clip_norm) scale *= *config.clip_norm / norm;
      }
      for (std::size_t k = 0; k < weights.size(); ++k) {
        auto w = weights[k];
        auto g = grads[k];
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= scale * g[j];
      }
      total += loss;
    }
    const double mean = total / static_cast<double>(records.size());
    result.epoch_losses.push_back(mean);
    if (config.on_epoch) config.on_epoch(epoch, mean);
  }

  params.epochs += config.epochs;
  params.training = {config.learning_rate, config.denoise_p, config.clip_norm};
  result.params = std::move(params);
  return result;
}

void write_loss_log(const std::vector<double>& losses, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write loss log " + path.string());
  out << "epoch,mean_loss\n";
  for (std::size_t e = 0; e < losses.size(); ++e) {
    out << (e + 1) << ',' << csv::format_double(losses[e]) << '\n';
  }
}

}  // namespace aw2v

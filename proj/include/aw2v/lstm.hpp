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

#ifndef AW2V_LSTM_HPP_
#define AW2V_LSTM_HPP_

#include <string>
#include <vector>

#include "aw2v/types.hpp"

namespace aw2v {

// Input-to-gate projections, each H x I.
struct GateWeights {
  Matrix i, f, c, o;

  static GateWeights zeros(Index input_dim, Index hidden_dim);
  Index input_dim() const { return i.cols(); }
  Index hidden_dim() const { return i.rows(); }
};

// One LSTM layer with peephole connections.
//
//   i_t = sigm(W_xi x_t + W_hi h_{t-1} + w_ci * c_{t-1} + b_i)
//   f_t = sigm(W_xf x_t + W_hf h_{t-1} + w_cf * c_{t-1} + b_f)
//   g_t = tanh(W_xc x_t + W_hc h_{t-1} + b_c)
//   c_t = f_t * c_{t-1} + i_t * g_t
//   o_t = sigm(W_xo x_t + W_ho h_{t-1} + w_co * c_t + b_o)
//   h_t = o_t * tanh(c_t)
//
// `*` is elementwise. The output gate peeks at the new cell state.
struct LstmParams {
  GateWeights input;      // W_x*, H x I
  GateWeights recurrent;  // W_h*, H x H
  Vector peep_i, peep_f, peep_o;
  Vector bias_i, bias_f, bias_c, bias_o;

  static LstmParams zeros(Index input_dim, Index hidden_dim);
  Index input_dim() const { return input.input_dim(); }
  Index hidden_dim() const { return input.hidden_dim(); }

  // Throws DimensionError if any block disagrees with (I, H).
  void check_shapes() const;
};

struct LstmState {
  Vector h;
  Vector c;

  static LstmState zeros(Index hidden_dim);
};

// Everything cell_backward needs from one forward step.
struct LstmStep {
  Vector x;
  Vector h_prev, c_prev;
  Vector i, f, g, o;
  Vector c, tanh_c, h;

  LstmState state() const { return {h, c}; }
};

using LstmTape = std::vector<LstmStep>;

// Forward step using `in` as the input projection instead of params.input.
// The decoder uses this to feed inputs of a different width through the same
// recurrent core.
LstmStep cell_forward(const LstmParams& params, const GateWeights& in,
                      const Vector& x, const LstmState& prev);

inline LstmStep cell_forward(const LstmParams& params, const Vector& x,
                             const LstmState& prev) {
  return cell_forward(params, params.input, x, prev);
}

struct CellGradients {
  Vector x;
  Vector h_prev;
  Vector c_prev;
};

// Reverse of cell_forward. grad_h and grad_c are dL/dh_t and dL/dc_t arriving
// from above and from step t+1. Parameter gradients are added into `grad`
// (recurrent part, peepholes, biases) and `grad_in` (input projection).
CellGradients cell_backward(const LstmParams& params, const GateWeights& in,
                            const LstmStep& step, const Vector& grad_h,
                            const Vector& grad_c, LstmParams& grad,
                            GateWeights& grad_in);

inline CellGradients cell_backward(const LstmParams& params, const LstmStep& step,
                                   const Vector& grad_h, const Vector& grad_c,
                                   LstmParams& grad) {
  return cell_backward(params, params.input, step, grad_h, grad_c, grad, grad.input);
}

// Overflow-free logistic function.
double sigmoid(double a);

}  // namespace aw2v

#endif  // AW2V_LSTM_HPP_

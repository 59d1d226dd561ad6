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

#include "aw2v/lstm.hpp"

#include <cmath>

#include "aw2v/errors.hpp"

namespace aw2v {

double sigmoid(double a) {
  if (a >= 0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

namespace {

Vector sigmoid(const Vector& a) { return a.unaryExpr([](double v) { return aw2v::sigmoid(v); }); }

void expect_shape(const Matrix& m, Index rows, Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(name) + " is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                         "x" + std::to_string(cols));
  }
}

void expect_length(const Vector& v, Index n, const char* name) {
  if (v.size() != n) {
    throw DimensionError(std::string(name) + " has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(n));
  }
}

void check_gates(const GateWeights& w, Index rows, Index cols, const char* name) {
  expect_shape(w.i, rows, cols, name);
  expect_shape(w.f, rows, cols, name);
  expect_shape(w.c, rows, cols, name);
  expect_shape(w.o, rows, cols, name);
}

}  // namespace

GateWeights GateWeights::zeros(Index input_dim, Index hidden_dim) {
  const Matrix z = Matrix::Zero(hidden_dim, input_dim);
  return {z, z, z, z};
}

LstmParams LstmParams::zeros(Index input_dim, Index hidden_dim) {
  const Vector z = Vector::Zero(hidden_dim);
  return {GateWeights::zeros(input_dim, hidden_dim),
          GateWeights::zeros(hidden_dim, hidden_dim),
          z, z, z,
          z, z, z, z};
}

void LstmParams::check_shapes() const {
  const Index h = hidden_dim();
  check_gates(input, h, input_dim(), "input weights");
  check_gates(recurrent, h, h, "recurrent weights");
  for (const Vector* v : {&peep_i, &peep_f, &peep_o, &bias_i, &bias_f, &bias_c, &bias_o}) {
    expect_length(*v, h, "peephole/bias vector");
  }
}

LstmState LstmState::zeros(Index hidden_dim) {
  return {Vector::Zero(hidden_dim), Vector::Zero(hidden_dim)};
}

LstmStep cell_forward(const LstmParams& p, const GateWeights& in, const Vector& x,
                      const LstmState& prev) {
  const Index h = p.hidden_dim();
  if (in.hidden_dim() != h) throw DimensionError("input projection has wrong hidden width");
  expect_length(x, in.input_dim(), "LSTM input");
  expect_length(prev.h, h, "previous hidden state");
  expect_length(prev.c, h, "previous cell state");

  LstmStep s;
  s.x = x;
  s.h_prev = prev.h;
  s.c_prev = prev.c;
  s.i = sigmoid(in.i * x + p.recurrent.i * prev.h + p.peep_i.cwiseProduct(prev.c) + p.bias_i);
  s.f = sigmoid(in.f * x + p.recurrent.f * prev.h + p.peep_f.cwiseProduct(prev.c) + p.bias_f);
  s.g = (in.c * x + p.recurrent.c * prev.h + p.bias_c).array().tanh().matrix();
  s.c = s.f.cwiseProduct(prev.c) + s.i.cwiseProduct(s.g);
  s.o = sigmoid(in.o * x + p.recurrent.o * prev.h + p.peep_o.cwiseProduct(s.c) + p.bias_o);
  s.tanh_c = s.c.array().tanh().matrix();
  s.h = s.o.cwiseProduct(s.tanh_c);
  return s;
}

CellGradients cell_backward(const LstmParams& p, const GateWeights& in,
                            const LstmStep& s, const Vector& grad_h,
                            const Vector& grad_c, LstmParams& grad,
                            GateWeights& grad_in) {
  const Index h = p.hidden_dim();
  expect_length(grad_h, h, "hidden-state gradient");
  expect_length(grad_c, h, "cell-state gradient");
  expect_length(s.x, in.input_dim(), "taped input");
  check_gates(grad_in, h, in.input_dim(), "input-weight gradient");

  const auto ones = Vector::Ones(h).array();
  const Vector d_o = grad_h.cwiseProduct(s.tanh_c);
  const Vector da_o = (d_o.array() * s.o.array() * (ones - s.o.array())).matrix();

  Vector dc = grad_c + (grad_h.array() * s.o.array() *
                        (ones - s.tanh_c.array().square())).matrix();
  dc += da_o.cwiseProduct(p.peep_o);

  const Vector da_i = (dc.array() * s.g.array() * s.i.array() * (ones - s.i.array())).matrix();
  const Vector da_f =
      (dc.array() * s.c_prev.array() * s.f.array() * (ones - s.f.array())).matrix();
  const Vector da_g = (dc.array() * s.i.array() * (ones - s.g.array().square())).matrix();

  CellGradients out;
  out.c_prev = dc.cwiseProduct(s.f) + da_i.cwiseProduct(p.peep_i) + da_f.cwiseProduct(p.peep_f);
  out.h_prev = p.recurrent.i.transpose() * da_i + p.recurrent.f.transpose() * da_f +
               p.recurrent.c.transpose() * da_g + p.recurrent.o.transpose() * da_o;
  out.x = in.i.transpose() * da_i + in.f.transpose() * da_f + in.c.transpose() * da_g +
          in.o.transpose() * da_o;

  grad_in.i.noalias() += da_i * s.x.transpose();
  grad_in.f.noalias() += da_f * s.x.transpose();
  grad_in.c.noalias() += da_g * s.x.transpose();
  grad_in.o.noalias() += da_o * s.x.transpose();
  grad.recurrent.i.noalias() += da_i * s.h_prev.transpose();
  grad.recurrent.f.noalias() += da_f * s.h_prev.transpose();
  grad.recurrent.c.noalias() += da_g * s.h_prev.transpose();
  grad.recurrent.o.noalias() += da_o * s.h_prev.transpose();
  grad.peep_i += da_i.cwiseProduct(s.c_prev);
  grad.peep_f += da_f.cwiseProduct(s.c_prev);
  grad.peep_o += da_o.cwiseProduct(s.c);
  grad.bias_i += da_i;
  grad.bias_f += da_f;
  grad.bias_c += da_g;
  grad.bias_o += da_o;
  return out;
}

}  // namespace aw2v

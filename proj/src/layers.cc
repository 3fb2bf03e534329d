// Copyright 2026 The DIMNet-Toy Authors. All Rights Reserved.
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

#include "dimnet/layers.h"

#include <cmath>

#include "dimnet/error.h"

namespace dimnet::nn {

const char* BlockKindName(BlockKind kind) {
  switch (kind) {
    case BlockKind::kFeedForward: return "feedforward";
    case BlockKind::kSelfAttention: return "self_attention";
    case BlockKind::kConformer: return "conformer";
  }
  return "?";
}

BlockKind ParseBlockKind(const std::string& s) {
  if (s == "feedforward") return BlockKind::kFeedForward;
  if (s == "self_attention") return BlockKind::kSelfAttention;
  if (s == "conformer") return BlockKind::kConformer;
  Fail(ErrorCode::kConfig,
       "unknown block kind '" + s + "' (feedforward|self_attention|conformer)");
}

void XavierUniform(Mat* m, Rng* rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m->rows() + m->cols()));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index c = 0; c < m->cols(); ++c)
    for (Eigen::Index r = 0; r < m->rows(); ++r) (*m)(r, c) = dist(*rng);
}

Linear::Linear(ParamStore* store, const std::string& name, int in, int out,
               bool bias, Rng* rng)
    : in_(in), out_(out) {
  w_ = store->Add(name + ".weight", in, out);
  XavierUniform(&w_->value, rng);
  if (bias) b_ = store->Add(name + ".bias", 1, out);
}

Var Linear::Forward(Graph& g, Var x) const {
  DIMNET_CHECK_SHAPE(x.cols() == in_, w_->name + ": expected input width " +
                                          std::to_string(in_) + ", got " +
                                          std::to_string(x.cols()));
  Var y = ag::MatMul(x, g.Param(*w_));
  return b_ ? ag::AddRow(y, g.Param(*b_)) : y;
}

LayerNormLayer::LayerNormLayer(ParamStore* store, const std::string& name,
                               int dim) {
  gamma_ = store->Add(name + ".gamma", 1, dim);
  gamma_->value.setOnes();
  beta_ = store->Add(name + ".beta", 1, dim);
}

Var LayerNormLayer::Forward(Graph& g, Var x) const {
  return ag::LayerNorm(x, g.Param(*gamma_), g.Param(*beta_));
}

FeedForward::FeedForward(ParamStore* store, const std::string& name, int d,
                         int inner, Rng* rng)
    : norm_(store, name + ".norm", d),
      up_(store, name + ".up", d, inner, true, rng),
      down_(store, name + ".down", inner, d, true, rng) {}

Var FeedForward::Forward(Graph& g, Var x) const {
  return down_.Forward(g, ag::Swish(up_.Forward(g, norm_.Forward(g, x))));
}

MultiHeadAttention::MultiHeadAttention(ParamStore* store,
                                       const std::string& name, int d,
                                       int kv_dim, int heads, Rng* rng)
    : wq_(store, name + ".q", d, d, true, rng),
      // A key bias shifts every score in a row equally; softmax drops it.
      wk_(store, name + ".k", kv_dim, d, false, rng),
      wv_(store, name + ".v", kv_dim, d, true, rng),
      wo_(store, name + ".o", d, d, true, rng),
      heads_(heads) {
  if (heads <= 0 || d % heads != 0)
    Fail(ErrorCode::kConfig, name + ": d_model must be divisible by heads");
}

Var MultiHeadAttention::Forward(Graph& g, Var query, Var memory,
                                bool causal) const {
  Var q = wq_.Forward(g, query);
  Var k = wk_.Forward(g, memory);
  Var v = wv_.Forward(g, memory);
  const int d = wq_.out();
  const int dh = d / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Var> outs;
  outs.reserve(heads_);
  for (int h = 0; h < heads_; ++h) {
    Var qh = heads_ == 1 ? q : ag::SliceCols(q, h * dh, dh);
    Var kh = heads_ == 1 ? k : ag::SliceCols(k, h * dh, dh);
    Var vh = heads_ == 1 ? v : ag::SliceCols(v, h * dh, dh);
    Var att = ag::Softmax(ag::Scale(ag::MatMulNT(qh, kh), scale), causal);
    outs.push_back(ag::MatMul(att, vh));
  }
  Var cat = heads_ == 1 ? outs[0] : ag::ConcatCols(outs);
  return wo_.Forward(g, cat);
}

ConvModule::ConvModule(ParamStore* store, const std::string& name, int d,
                       int kernel, Rng* rng)
    : norm_in_(store, name + ".norm_in", d),
      pw1_(store, name + ".pw1", d, 2 * d, true, rng) {
  if (kernel < 1 || kernel % 2 == 0)
    Fail(ErrorCode::kConfig, name + ": conv kernel must be odd and positive");
  dw_kernel_ = store->Add(name + ".dw.kernel", kernel, d);
  XavierUniform(&dw_kernel_->value, rng);
  dw_bias_ = store->Add(name + ".dw.bias", 1, d);
  norm_mid_ = LayerNormLayer(store, name + ".norm_mid", d);
  pw2_ = Linear(store, name + ".pw2", d, d, true, rng);
}

Var ConvModule::Forward(Graph& g, Var x) const {
  Var h = ag::Glu(pw1_.Forward(g, norm_in_.Forward(g, x)));
  h = ag::DepthwiseConv1d(h, g.Param(*dw_kernel_), g.Param(*dw_bias_));
  h = ag::Swish(norm_mid_.Forward(g, h));
  return pw2_.Forward(g, h);
}

FeedForwardBlock::FeedForwardBlock(ParamStore* store, const std::string& name,
                                   const BlockDims& dims, Rng* rng)
    : ffn_(store, name + ".ffn", dims.d_model, dims.ffn_dim, rng) {}

Var FeedForwardBlock::Forward(Graph& g, Var x) const {
  return ag::Add(x, ffn_.Forward(g, x));
}

SelfAttentionBlock::SelfAttentionBlock(ParamStore* store,
                                       const std::string& name,
                                       const BlockDims& dims, Rng* rng)
    : norm_(store, name + ".norm_attn", dims.d_model),
      attn_(store, name + ".attn", dims.d_model, dims.d_model, dims.heads, rng),
      ffn_(store, name + ".ffn", dims.d_model, dims.ffn_dim, rng) {}

Var SelfAttentionBlock::Forward(Graph& g, Var x) const {
  Var n = norm_.Forward(g, x);
  x = ag::Add(x, attn_.Forward(g, n, n, false));
  return ag::Add(x, ffn_.Forward(g, x));
}

ConformerBlock::ConformerBlock(ParamStore* store, const std::string& name,
                               const BlockDims& dims, Rng* rng)
    : ffn1_(store, name + ".ffn1", dims.d_model, dims.ffn_dim, rng),
      norm_attn_(store, name + ".norm_attn", dims.d_model),
      attn_(store, name + ".attn", dims.d_model, dims.d_model, dims.heads, rng),
      conv_(store, name + ".conv", dims.d_model, dims.conv_kernel, rng),
      ffn2_(store, name + ".ffn2", dims.d_model, dims.ffn_dim, rng),
      norm_out_(store, name + ".norm_out", dims.d_model) {}

Var ConformerBlock::Forward(Graph& g, Var x) const {
  x = ag::Add(x, ag::Scale(ffn1_.Forward(g, x), 0.5));
  Var n = norm_attn_.Forward(g, x);
  x = ag::Add(x, attn_.Forward(g, n, n, false));
  x = ag::Add(x, conv_.Forward(g, x));
  x = ag::Add(x, ag::Scale(ffn2_.Forward(g, x), 0.5));
  return norm_out_.Forward(g, x);
}

std::unique_ptr<EncoderBlock> MakeEncoderBlock(BlockKind kind,
                                               ParamStore* store,
                                               const std::string& name,
                                               const BlockDims& dims,
                                               Rng* rng) {
  switch (kind) {
    case BlockKind::kFeedForward:
      return std::make_unique<FeedForwardBlock>(store, name, dims, rng);
    case BlockKind::kSelfAttention:
      return std::make_unique<SelfAttentionBlock>(store, name, dims, rng);
    case BlockKind::kConformer:
      return std::make_unique<ConformerBlock>(store, name, dims, rng);
  }
  Fail(ErrorCode::kConfig, "bad block kind");
}

DecoderLayer::DecoderLayer(ParamStore* store, const std::string& name,
                           const BlockDims& dims, int memory_dim, Rng* rng)
    : norm_self_(store, name + ".norm_self", dims.d_model),
      self_attn_(store, name + ".self_attn", dims.d_model, dims.d_model,
                 dims.heads, rng),
      norm_cross_(store, name + ".norm_cross", dims.d_model),
      cross_attn_(store, name + ".cross_attn", dims.d_model, memory_dim,
                  dims.heads, rng),
      ffn_(store, name + ".ffn", dims.d_model, dims.ffn_dim, rng) {}

Var DecoderLayer::Forward(Graph& g, Var x, Var memory) const {
  Var n = norm_self_.Forward(g, x);
  x = ag::Add(x, self_attn_.Forward(g, n, n, true));
  x = ag::Add(x, cross_attn_.Forward(g, norm_cross_.Forward(g, x), memory, false));
  return ag::Add(x, ffn_.Forward(g, x));
}

Mat PositionalEncoding(int rows, int d) {
  Mat pe(rows, d);
  for (int t = 0; t < rows; ++t) {
    for (int i = 0; i < d; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(i - i % 2) / d);
      pe(t, i) = (i % 2 == 0) ? std::sin(t * freq) : std::cos(t * freq);
    }
  }
  return pe;
}

}  // namespace dimnet::nn

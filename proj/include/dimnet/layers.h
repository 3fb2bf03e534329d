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

#ifndef DIMNET_LAYERS_H_
#define DIMNET_LAYERS_H_

// Building blocks shared by the encoders, the accent classifier and the
// attention decoder. Every block keeps the time axis intact; subsampling
// happens only in FrontEnd.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dimnet/autograd.h"

namespace dimnet::nn {

using ag::Graph;
using ag::Mat;
using ag::ParamStore;
using ag::Var;
using Rng = std::mt19937_64;

enum class BlockKind { kFeedForward, kSelfAttention, kConformer };

const char* BlockKindName(BlockKind kind);
BlockKind ParseBlockKind(const std::string& s);

struct BlockDims {
  int d_model = 64;
  int ffn_dim = 128;
  int heads = 2;
  int conv_kernel = 7;
};

// y = x W + b with W stored in x out.
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore* store, const std::string& name, int in, int out,
         bool bias, Rng* rng);
  Var Forward(Graph& g, Var x) const;
  int in() const { return in_; }
  int out() const { return out_; }
  ag::Parameter* weight() const { return w_; }
  ag::Parameter* bias() const { return b_; }

 private:
  ag::Parameter* w_ = nullptr;
  ag::Parameter* b_ = nullptr;
  int in_ = 0;
  int out_ = 0;
};

class LayerNormLayer {
 public:
  LayerNormLayer() = default;
  LayerNormLayer(ParamStore* store, const std::string& name, int dim);
  Var Forward(Graph& g, Var x) const;

 private:
  ag::Parameter* gamma_ = nullptr;
  ag::Parameter* beta_ = nullptr;
};

// Pre-norm position-wise FFN without the residual.
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(ParamStore* store, const std::string& name, int d, int inner,
              Rng* rng);
  Var Forward(Graph& g, Var x) const;

 private:
  LayerNormLayer norm_;
  Linear up_;
  Linear down_;
};

class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  // Queries have width d; keys and values are projected from width kv_dim.
  MultiHeadAttention(ParamStore* store, const std::string& name, int d,
                     int kv_dim, int heads, Rng* rng);
  Var Forward(Graph& g, Var query, Var memory, bool causal) const;
  int kv_dim() const { return wk_.in(); }

 private:
  Linear wq_, wk_, wv_, wo_;
  int heads_ = 1;
};

// Conformer convolution module: pointwise + GLU, depthwise, norm, swish,
// pointwise. LayerNorm stands in for batch norm.
class ConvModule {
 public:
  ConvModule() = default;
  ConvModule(ParamStore* store, const std::string& name, int d, int kernel,
             Rng* rng);
  Var Forward(Graph& g, Var x) const;

 private:
  LayerNormLayer norm_in_;
  Linear pw1_;
  ag::Parameter* dw_kernel_ = nullptr;
  ag::Parameter* dw_bias_ = nullptr;
  LayerNormLayer norm_mid_;
  Linear pw2_;
};

class EncoderBlock {
 public:
  virtual ~EncoderBlock() = default;
  virtual Var Forward(Graph& g, Var x) const = 0;
};

std::unique_ptr<EncoderBlock> MakeEncoderBlock(BlockKind kind,
                                               ParamStore* store,
                                               const std::string& name,
                                               const BlockDims& dims,
                                               Rng* rng);

// x + FFN(x)
class FeedForwardBlock : public EncoderBlock {
 public:
  FeedForwardBlock(ParamStore* store, const std::string& name,
                   const BlockDims& dims, Rng* rng);
  Var Forward(Graph& g, Var x) const override;

 private:
  FeedForward ffn_;
};

// Transformer encoder layer: x + MHSA(LN x), then x + FFN(x).
class SelfAttentionBlock : public EncoderBlock {
 public:
  SelfAttentionBlock(ParamStore* store, const std::string& name,
                     const BlockDims& dims, Rng* rng);
  Var Forward(Graph& g, Var x) const override;

 private:
  LayerNormLayer norm_;
  MultiHeadAttention attn_;
  FeedForward ffn_;
};

// Macaron FFN / MHSA / conv / FFN, then a final norm.
class ConformerBlock : public EncoderBlock {
 public:
  ConformerBlock(ParamStore* store, const std::string& name,
                 const BlockDims& dims, Rng* rng);
  Var Forward(Graph& g, Var x) const override;

 private:
  FeedForward ffn1_;
  LayerNormLayer norm_attn_;
  MultiHeadAttention attn_;
  ConvModule conv_;
  FeedForward ffn2_;
  LayerNormLayer norm_out_;
};

// Causal self-attention, cross-attention over `memory`, FFN.
class DecoderLayer {
 public:
  DecoderLayer() = default;
  DecoderLayer(ParamStore* store, const std::string& name,
               const BlockDims& dims, int memory_dim, Rng* rng);
  Var Forward(Graph& g, Var x, Var memory) const;

 private:
  LayerNormLayer norm_self_;
  MultiHeadAttention self_attn_;
  LayerNormLayer norm_cross_;
  MultiHeadAttention cross_attn_;
  FeedForward ffn_;
};

// Sinusoidal absolute positions, rows x d.
Mat PositionalEncoding(int rows, int d);

void XavierUniform(Mat* m, Rng* rng);

}  // namespace dimnet::nn

#endif  // DIMNET_LAYERS_H_

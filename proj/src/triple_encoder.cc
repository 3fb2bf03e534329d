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

#include "dimnet/triple_encoder.h"

#include <string>

#include "dimnet/error.h"

namespace dimnet {

std::array<int, 3> TapLayers(int num_layers) {
  if (num_layers < 1) Fail(ErrorCode::kConfig, "shared encoder needs at least one layer");
  return {(num_layers + 2) / 3, (2 * num_layers + 2) / 3, num_layers};
}

TripleEncoder::TripleEncoder(ag::ParamStore* store, const ModelConfig& cfg,
                             int feat_dim, int enc_emb_dim, nn::Rng* rng)
    : subsample_(cfg.subsample), d_model_(cfg.d_model), feat_dim_(feat_dim) {
  front_ = nn::Linear(store, "front", feat_dim * cfg.subsample, cfg.d_model, true, rng);
  const auto dims = cfg.dims();
  for (int i = 0; i < cfg.shared_layers; ++i)
    shared_.push_back(nn::MakeEncoderBlock(cfg.block_kind, store,
                                           "shared." + std::to_string(i), dims, rng));
  const int ctc_layers = cfg.triple_encoder ? cfg.ctc_layers : 0;
  const int att_layers = cfg.triple_encoder ? cfg.att_layers : 0;
  for (int i = 0; i < ctc_layers; ++i)
    ctc_.push_back(nn::MakeEncoderBlock(cfg.block_kind, store,
                                        "ctc_enc." + std::to_string(i), dims, rng));
  if (enc_emb_dim > 0)
    att_in_proj_.emplace(store, "att_enc.in_proj", cfg.d_model + enc_emb_dim,
                         cfg.d_model, true, rng);
  for (int i = 0; i < att_layers; ++i)
    att_.push_back(nn::MakeEncoderBlock(cfg.block_kind, store,
                                        "att_enc." + std::to_string(i), dims, rng));
}

SharedEncoderOutput TripleEncoder::SharedForward(ag::Graph& g,
                                                 const ag::Mat& frames) const {
  DIMNET_CHECK_SHAPE(frames.rows() >= 1, "shared encoder input has no frames");
  DIMNET_CHECK_SHAPE(frames.cols() == feat_dim_,
                     "expected " + std::to_string(feat_dim_) + " features per frame");
  if (!frames.allFinite()) Fail(ErrorCode::kNumerics, "non-finite input frames");
  ag::Var x = ag::FrameStack(g.Constant(frames), subsample_);
  x = front_.Forward(g, x);
  x = ag::Add(x, g.Constant(nn::PositionalEncoding(static_cast<int>(x.rows()), d_model_)));

  SharedEncoderOutput out;
  out.tap_layers = TapLayers(static_cast<int>(shared_.size()));
  for (size_t i = 0; i < shared_.size(); ++i) {
    x = shared_[i]->Forward(g, x);
    const int layer = static_cast<int>(i) + 1;
    for (int k = 0; k < 3; ++k) {
      if (out.tap_layers[k] == layer) out.taps[k] = x;
    }
  }
  out.x_se = x;
  return out;
}

ag::Var TripleEncoder::CtcEncode(ag::Graph& g, ag::Var x_se) const {
  DIMNET_CHECK_SHAPE(x_se.cols() == d_model_, "CTC encoder width mismatch");
  for (const auto& b : ctc_) x_se = b->Forward(g, x_se);
  return x_se;
}

ag::Var ConcatEmbedding(ag::Var x, ag::Var emb) {
  const auto T = x.rows();
  if (emb.rows() == 1 && T != 1) {
    emb = ag::RepeatRows(emb, static_cast<int>(T));
  } else if (emb.rows() != T) {
    Fail(ErrorCode::kShape, "accent embedding has " + std::to_string(emb.rows()) +
                                " rows; expected 1 or " + std::to_string(T));
  }
  return ag::ConcatCols({x, emb});
}

ag::Var TripleEncoder::AttEncode(ag::Graph& g, ag::Var x_se,
                                 std::optional<ag::Var> emb) const {
  DIMNET_CHECK_SHAPE(x_se.cols() == d_model_, "attention encoder width mismatch");
  ag::Var x = x_se;
  if (emb) {
    DIMNET_CHECK_SHAPE(att_in_proj_.has_value(),
                       "attention encoder was built without an embedding input");
    x = att_in_proj_->Forward(g, ConcatEmbedding(x_se, *emb));
  }
  for (const auto& b : att_) x = b->Forward(g, x);
  return x;
}

}  // namespace dimnet

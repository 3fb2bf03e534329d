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

#ifndef DIMNET_TRIPLE_ENCODER_H_
#define DIMNET_TRIPLE_ENCODER_H_

// Shared encoder feeding a CTC encoder and an attention encoder. The shared
// encoder also exposes the outputs at 1/3, 2/3 and 3/3 of its depth for the
// accent branch.

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "dimnet/config.h"
#include "dimnet/layers.h"

namespace dimnet {

struct SharedEncoderOutput {
  ag::Var x_se;
  std::array<ag::Var, 3> taps;
  std::array<int, 3> tap_layers{};
};

// 1-based layer indices ceil(L/3), ceil(2L/3), L.
std::array<int, 3> TapLayers(int num_layers);

class TripleEncoder {
 public:
  // `enc_emb_dim` > 0 adds the width-matching projection used when an accent
  // embedding is concatenated in front of the attention encoder.
  TripleEncoder(ag::ParamStore* store, const ModelConfig& cfg, int feat_dim,
                int enc_emb_dim, nn::Rng* rng);

  SharedEncoderOutput SharedForward(ag::Graph& g, const ag::Mat& frames) const;
  ag::Var CtcEncode(ag::Graph& g, ag::Var x_se) const;
  // `emb` has 1 row (broadcast over time) or as many rows as x_se.
  ag::Var AttEncode(ag::Graph& g, ag::Var x_se,
                    std::optional<ag::Var> emb) const;

  int subsample() const { return subsample_; }
  int d_model() const { return d_model_; }
  int OutputFrames(int input_frames) const {
    return (input_frames + subsample_ - 1) / subsample_;
  }

 private:
  int subsample_;
  int d_model_;
  int feat_dim_;
  nn::Linear front_;
  std::vector<std::unique_ptr<nn::EncoderBlock>> shared_;
  std::vector<std::unique_ptr<nn::EncoderBlock>> ctc_;
  std::vector<std::unique_ptr<nn::EncoderBlock>> att_;
  std::optional<nn::Linear> att_in_proj_;
};

// Concat(x, emb) along features, broadcasting a 1-row emb over time.
ag::Var ConcatEmbedding(ag::Var x, ag::Var emb);

}  // namespace dimnet

#endif  // DIMNET_TRIPLE_ENCODER_H_

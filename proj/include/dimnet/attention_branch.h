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

#ifndef DIMNET_ATTENTION_BRANCH_H_
#define DIMNET_ATTENTION_BRANCH_H_

#include <optional>
#include <utility>
#include <vector>

#include "dimnet/config.h"
#include "dimnet/layers.h"

namespace dimnet {

struct FusionRoute {
  bool encoder = false;
  bool decoder = false;
};

// AF_i: nowhere, AF_ie: encoder, AF_id: decoder, AF_ied: both.
FusionRoute SchemeRoute(FusionScheme scheme);

// Routes `emb` to the (encoder, decoder) slots. Fusing schemes without an
// embedding are a ConfigError; AF_i ignores `emb` entirely.
std::pair<std::optional<ag::Var>, std::optional<ag::Var>> ApplyScheme(
    FusionScheme scheme, std::optional<ag::Var> emb);

// Decoder memory: x_ae, or Concat(x_ae, emb) when the decoder slot is used.
ag::Var BuildMemory(ag::Var x_ae, std::optional<ag::Var> dec_emb);

class AttentionDecoder {
 public:
  AttentionDecoder(ag::ParamStore* store, const ModelConfig& cfg, int vocab,
                   int memory_dim, nn::Rng* rng);

  // Teacher-forced forward; `ys_in` starts with <sos>. Returns |ys_in| x V
  // log posteriors, row t predicting token t+1.
  ag::Var Forward(ag::Graph& g, ag::Var memory, const std::vector<int>& ys_in) const;

  int vocab() const { return vocab_; }
  int memory_dim() const { return memory_dim_; }

 private:
  int vocab_;
  int memory_dim_;
  int d_model_;
  ag::Parameter* embed_;
  std::vector<nn::DecoderLayer> layers_;
  nn::LayerNormLayer norm_;
  nn::Linear out_;
};

// Mean label-smoothed cross-entropy over positions:
// (1 - eps) * -log p(target) + eps * mean_v(-log p(v)).
ag::Var AttentionLoss(ag::Var log_posteriors, const std::vector<int>& targets,
                      double smoothing);

}  // namespace dimnet

#endif  // DIMNET_ATTENTION_BRANCH_H_

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

#ifndef DIMNET_ACCENT_BRANCH_H_
#define DIMNET_ACCENT_BRANCH_H_

// Linguistic-acoustic similarity accent branch.
//
// Frame-aligned text x_t (one-hot of the regularized CTC greedy path) is
// mapped into N anchor spaces, the concatenated shared-encoder taps x_a are
// mapped into the same spaces, and their scaled dot products form the accent
// shift s (T x N). s joined with a reduced text reference v_td gives the
// bimodal representation x_bm (T x C) that a small self-attention classifier
// turns into accent posteriors.

#include <memory>
#include <vector>

#include "dimnet/config.h"
#include "dimnet/layers.h"
#include "dimnet/triple_encoder.h"

namespace dimnet {

struct AccentInputs {
  ag::Var x_a;  // T x 3d
  ag::Var x_t;  // T x text_dim, one-hot
};

// x_a is the concat of the three taps; with `detach_taps` no gradient flows
// back into the shared encoder through it. x_t is a constant.
AccentInputs BuildAccentInputs(ag::Graph& g, const SharedEncoderOutput& enc,
                               const std::vector<int>& aligned, int text_dim,
                               bool detach_taps);

struct AccentOutput {
  ag::Var log_posteriors;  // T x K (frame) or 1 x K (utterance)
  ag::Var hidden;          // input of the final linear layer
  ag::Var shift;           // s, T x N
  AccentLevel level = AccentLevel::kFrame;

  ag::Mat Posteriors() const;
  // Utterance-level distribution: the single row, or the frame mean.
  Eigen::VectorXd UtterancePosterior() const;
  int Predict() const;
};

class AccentBranch {
 public:
  AccentBranch(ag::ParamStore* store, const ModelConfig& cfg,
               int acoustic_dim, int text_dim, int n_accents, nn::Rng* rng);

  ag::Var AccentShift(ag::Graph& g, ag::Var x_a, ag::Var x_t) const;
  ag::Var Bimodal(ag::Graph& g, ag::Var x_t, ag::Var shift) const;
  AccentOutput Classify(ag::Graph& g, ag::Var x_bm, ag::Var shift,
                        AccentLevel level) const;
  // Full branch: inputs -> shift -> bimodal -> classifier.
  AccentOutput Forward(ag::Graph& g, const AccentInputs& in,
                       AccentLevel level) const;

  // dnn: hidden as is; pp / sim: posteriors / shift up-projected to
  // emb_dim. With `detach` the result carries no gradient path back.
  ag::Var MakeEmbedding(ag::Graph& g, const AccentOutput& out,
                        EmbeddingKind kind, bool detach) const;

  int spaces() const { return spaces_; }
  int width() const { return width_; }
  int dk() const { return dk_; }
  int emb_dim() const { return emb_dim_; }

  // Exposed for tests that pin the mapping matrices.
  ag::Parameter* text_map() const { return w_t_; }
  ag::Parameter* acoustic_map() const { return w_a_; }
  ag::Parameter* text_reduce() const { return w_td_; }

 private:
  int spaces_, width_, dk_, emb_dim_, n_accents_;
  ag::Parameter* w_t_;   // text_dim x (N * dk)
  ag::Parameter* w_a_;   // acoustic_dim x (N * dk)
  ag::Parameter* w_td_;  // text_dim x (C - N)
  std::vector<std::unique_ptr<nn::EncoderBlock>> blocks_;
  nn::Linear hidden_;
  nn::Linear out_;
  nn::Linear up_pp_;
  nn::Linear up_sim_;
};

// Weighted cross-entropy: frame level averages over frames.
ag::Var AccentLoss(const AccentOutput& out, int label,
                   const std::vector<double>& class_weights);

}  // namespace dimnet

#endif  // DIMNET_ACCENT_BRANCH_H_

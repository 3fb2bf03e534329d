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

#ifndef DIMNET_MODEL_H_
#define DIMNET_MODEL_H_

#include <memory>
#include <optional>
#include <vector>

#include "dimnet/accent_branch.h"
#include "dimnet/attention_branch.h"
#include "dimnet/config.h"
#include "dimnet/synthgen.h"
#include "dimnet/triple_encoder.h"
#include "dimnet/vocab.h"

namespace dimnet {

struct EncodeResult {
  SharedEncoderOutput shared;
  ag::Var x_ce;
  ag::Var ctc_log_probs;
  std::vector<int> greedy_frames;
  std::vector<int> aligned;
  bool all_blank = false;
  AccentInputs accent_in;
  AccentOutput accent;
  std::optional<ag::Var> emb;
  ag::Var x_ae;
  ag::Var memory;
};

struct LossTerms {
  ag::Var att;
  ag::Var ctc;  // +inf constant when the CTC target is infeasible
  ag::Var ar;   // zero constant when the accent label is withheld
  ag::Var total;
  bool ctc_feasible = true;
  bool ar_active = true;
};

// The full decoupled multi-task network: triple encoder, CTC head, accent
// branch and attention decoder, wired according to the fusion scheme.
class DimNet {
 public:
  DimNet(const Config& cfg, const UnitInventory& inv);
  DimNet(const DimNet&) = delete;
  DimNet& operator=(const DimNet&) = delete;

  EncodeResult Encode(ag::Graph& g, const ag::Mat& frames) const;
  ag::Var DecoderForward(ag::Graph& g, ag::Var memory,
                         const std::vector<int>& ys_in) const;
  LossTerms Losses(ag::Graph& g, const Utterance& u,
                   const std::vector<double>& class_weights) const;

  // CTC label space: fine ids, or coarse ids plus a trailing blank.
  std::vector<int> CtcTargets(const std::vector<int>& y_f,
                              const std::vector<int>& y_c) const;
  int ctc_vocab() const { return ctc_vocab_; }
  int ctc_blank() const { return ctc_blank_; }
  int text_silence() const { return text_silence_; }
  int n_accents() const { return n_accents_; }

  const Config& config() const { return cfg_; }
  const UnitInventory& inventory() const { return inv_; }
  ag::ParamStore& params() { return store_; }
  const ag::ParamStore& params() const { return store_; }
  const TripleEncoder& encoder() const { return *encoder_; }
  const AccentBranch& accent_branch() const { return *accent_; }
  const AttentionDecoder& decoder() const { return *decoder_; }

 private:
  Config cfg_;
  UnitInventory inv_;
  ag::ParamStore store_;
  int ctc_vocab_ = 0;
  int ctc_blank_ = 0;
  int text_silence_ = 0;
  int n_accents_ = 0;
  std::unique_ptr<TripleEncoder> encoder_;
  nn::Linear ctc_head_;
  std::unique_ptr<AccentBranch> accent_;
  std::unique_ptr<AttentionDecoder> decoder_;
};

}  // namespace dimnet

#endif  // DIMNET_MODEL_H_

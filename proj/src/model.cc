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

#include "dimnet/model.h"

#include "dimnet/ctc.h"
#include "dimnet/error.h"

namespace dimnet {

DimNet::DimNet(const Config& cfg, const UnitInventory& inv)
    : cfg_(cfg), inv_(inv), n_accents_(cfg.corpus.n_accents) {
  ValidateConfig(cfg_);
  const ModelConfig& m = cfg_.model;
  if (m.units == UnitsMode::kTwoGranularity) {
    ctc_vocab_ = inv_.size(Side::kFine);
    ctc_blank_ = inv_.blank_id();
    text_silence_ = inv_.silence_id() >= 0 ? inv_.silence_id() : 1;
  } else {
    ctc_vocab_ = inv_.size(Side::kCoarse) + 1;
    ctc_blank_ = inv_.size(Side::kCoarse);
    text_silence_ = inv_.unk_id();
  }
  nn::Rng rng(m.seed);
  const FusionRoute route = SchemeRoute(m.fusion);
  encoder_ = std::make_unique<TripleEncoder>(&store_, m, cfg_.corpus.feat_dim,
                                             route.encoder ? m.emb_dim : 0, &rng);
  ctc_head_ = nn::Linear(&store_, "ctc.head", m.d_model, ctc_vocab_, true, &rng);
  accent_ = std::make_unique<AccentBranch>(&store_, m, 3 * m.d_model, ctc_vocab_,
                                           n_accents_, &rng);
  decoder_ = std::make_unique<AttentionDecoder>(
      &store_, m, inv_.size(Side::kCoarse),
      m.d_model + (route.decoder ? m.emb_dim : 0), &rng);
}

std::vector<int> DimNet::CtcTargets(const std::vector<int>& y_f,
                                    const std::vector<int>& y_c) const {
  return cfg_.model.units == UnitsMode::kTwoGranularity ? y_f : y_c;
}

EncodeResult DimNet::Encode(ag::Graph& g, const ag::Mat& frames) const {
  const ModelConfig& m = cfg_.model;
  EncodeResult r;
  r.shared = encoder_->SharedForward(g, frames);
  r.x_ce = encoder_->CtcEncode(g, r.shared.x_se);
  r.ctc_log_probs = ag::LogSoftmax(ctc_head_.Forward(g, r.x_ce));
  r.greedy_frames = ctc::GreedyFrames(r.ctc_log_probs.val());
  int all_blank = 0;
  r.aligned = ctc::RegularizeOrSilence(r.greedy_frames, ctc_blank_, text_silence_, &all_blank);
  r.all_blank = all_blank > 0;
  r.accent_in = BuildAccentInputs(g, r.shared, r.aligned, ctc_vocab_, m.detach_taps);
  r.accent = accent_->Forward(g, r.accent_in, m.ar_level);
  const FusionRoute route = SchemeRoute(m.fusion);
  if (route.encoder || route.decoder)
    r.emb = accent_->MakeEmbedding(g, r.accent, m.emb_kind, m.detach);
  auto [enc_emb, dec_emb] = ApplyScheme(m.fusion, r.emb);
  r.x_ae = encoder_->AttEncode(g, r.shared.x_se, enc_emb);
  r.memory = BuildMemory(r.x_ae, dec_emb);
  return r;
}

ag::Var DimNet::DecoderForward(ag::Graph& g, ag::Var memory,
                               const std::vector<int>& ys_in) const {
  return decoder_->Forward(g, memory, ys_in);
}

LossTerms DimNet::Losses(ag::Graph& g, const Utterance& u,
                         const std::vector<double>& class_weights) const {
  const TrainConfig& t = cfg_.train;
  EncodeResult r = Encode(g, u.frames);
  LossTerms l;
  l.ctc = ctc::LossVar(r.ctc_log_probs, CtcTargets(u.y_f, u.y_c), ctc_blank_,
                       &l.ctc_feasible);

  std::vector<int> ys_in = {inv_.bos_id()};
  ys_in.insert(ys_in.end(), u.y_c.begin(), u.y_c.end());
  std::vector<int> targets(u.y_c);
  targets.push_back(inv_.eos_id());
  l.att = AttentionLoss(decoder_->Forward(g, r.memory, ys_in), targets, t.label_smoothing);

  l.ar_active = u.accent >= 0;
  if (l.ar_active) {
    l.ar = AccentLoss(r.accent, u.accent, class_weights);
  } else {
    l.ar = g.Constant(ag::Mat::Zero(1, 1));
  }
  l.total = ag::WeightedSum({l.att, l.ctc, l.ar},
                            {t.w_att, l.ctc_feasible ? t.w_ctc : 0.0,
                             l.ar_active ? t.w_ar : 0.0});
  return l;
}

}  // namespace dimnet

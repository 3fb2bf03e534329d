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

#include "dimnet/accent_branch.h"

#include <cmath>
#include <string>

#include "dimnet/error.h"

namespace dimnet {

AccentInputs BuildAccentInputs(ag::Graph& g, const SharedEncoderOutput& enc,
                               const std::vector<int>& aligned, int text_dim,
                               bool detach_taps) {
  const auto T = enc.x_se.rows();
  for (const auto& tap : enc.taps)
    DIMNET_CHECK_SHAPE(tap.rows() == T, "taps disagree on frame count");
  DIMNET_CHECK_SHAPE(static_cast<Eigen::Index>(aligned.size()) == T,
                     "aligned text has " + std::to_string(aligned.size()) +
                         " frames, encoder has " + std::to_string(T));
  AccentInputs in;
  in.x_a = ag::ConcatCols({enc.taps[0], enc.taps[1], enc.taps[2]});
  if (detach_taps) in.x_a = g.Detach(in.x_a);
  ag::Mat onehot = ag::Mat::Zero(T, text_dim);
  for (Eigen::Index t = 0; t < T; ++t) {
    const int id = aligned[t];
    if (id < 0 || id >= text_dim)
      Fail(ErrorCode::kIndexOutOfRange, "aligned id " + std::to_string(id));
    onehot(t, id) = 1.0;
  }
  in.x_t = g.Constant(std::move(onehot));
  return in;
}

ag::Mat AccentOutput::Posteriors() const {
  return log_posteriors.val().array().exp().matrix();
}

Eigen::VectorXd AccentOutput::UtterancePosterior() const {
  return Posteriors().colwise().mean().transpose();
}

int AccentOutput::Predict() const {
  Eigen::VectorXd p = UtterancePosterior();
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < p.size(); ++k) {
    if (p(k) > p(best)) best = k;
  }
  return static_cast<int>(best);
}

AccentBranch::AccentBranch(ag::ParamStore* store, const ModelConfig& cfg,
                           int acoustic_dim, int text_dim, int n_accents,
                           nn::Rng* rng)
    : spaces_(cfg.lasas_spaces),
      width_(cfg.lasas_width),
      dk_(cfg.lasas_dk),
      emb_dim_(cfg.emb_dim),
      n_accents_(n_accents) {
  if (width_ <= spaces_) Fail(ErrorCode::kConfig, "lasas_width must exceed lasas_spaces");
  w_t_ = store->Add("accent.text_map", text_dim, spaces_ * dk_);
  nn::XavierUniform(&w_t_->value, rng);
  w_a_ = store->Add("accent.acoustic_map", acoustic_dim, spaces_ * dk_);
  nn::XavierUniform(&w_a_->value, rng);
  w_td_ = store->Add("accent.text_reduce", text_dim, width_ - spaces_);
  nn::XavierUniform(&w_td_->value, rng);
  nn::BlockDims dims{width_, 2 * width_, cfg.heads, cfg.conv_kernel};
  for (int i = 0; i < cfg.classifier_blocks; ++i)
    blocks_.push_back(nn::MakeEncoderBlock(nn::BlockKind::kSelfAttention, store,
                                           "accent.classifier." + std::to_string(i),
                                           dims, rng));
  hidden_ = nn::Linear(store, "accent.hidden", width_, emb_dim_, true, rng);
  out_ = nn::Linear(store, "accent.out", emb_dim_, n_accents, true, rng);
  up_pp_ = nn::Linear(store, "accent.up_pp", n_accents, emb_dim_, true, rng);
  up_sim_ = nn::Linear(store, "accent.up_sim", spaces_, emb_dim_, true, rng);
}

ag::Var AccentBranch::AccentShift(ag::Graph& g, ag::Var x_a, ag::Var x_t) const {
  DIMNET_CHECK_SHAPE(x_a.rows() == x_t.rows(), "x_a and x_t frame mismatch");
  ag::Var v_t = ag::MatMul(x_t, g.Param(*w_t_));
  ag::Var v_a = ag::MatMul(x_a, g.Param(*w_a_));
  ag::Var dots = ag::BlockSumCols(ag::Mul(v_a, v_t), dk_);
  return ag::Scale(dots, 1.0 / std::sqrt(static_cast<double>(dk_)));
}

ag::Var AccentBranch::Bimodal(ag::Graph& g, ag::Var x_t, ag::Var shift) const {
  DIMNET_CHECK_SHAPE(shift.rows() == x_t.rows(), "shift and text frame mismatch");
  DIMNET_CHECK_SHAPE(shift.cols() == spaces_, "shift width must equal N");
  ag::Var v_td = ag::MatMul(x_t, g.Param(*w_td_));
  return ag::ConcatCols({shift, v_td});
}

AccentOutput AccentBranch::Classify(ag::Graph& g, ag::Var x_bm, ag::Var shift,
                                    AccentLevel level) const {
  DIMNET_CHECK_SHAPE(x_bm.cols() == width_, "bimodal width must equal C");
  ag::Var h = x_bm;
  for (const auto& b : blocks_) h = b->Forward(g, h);
  if (level == AccentLevel::kUtterance) h = ag::MeanRows(h);
  AccentOutput out;
  out.hidden = ag::Swish(hidden_.Forward(g, h));
  out.log_posteriors = ag::LogSoftmax(out_.Forward(g, out.hidden));
  out.shift = shift;
  out.level = level;
  return out;
}

AccentOutput AccentBranch::Forward(ag::Graph& g, const AccentInputs& in,
                                   AccentLevel level) const {
  ag::Var s = AccentShift(g, in.x_a, in.x_t);
  return Classify(g, Bimodal(g, in.x_t, s), s, level);
}

ag::Var AccentBranch::MakeEmbedding(ag::Graph& g, const AccentOutput& out,
                                    EmbeddingKind kind, bool detach) const {
  ag::Var emb;
  switch (kind) {
    case EmbeddingKind::kDnn:
      emb = out.hidden;
      break;
    case EmbeddingKind::kPp:
      emb = up_pp_.Forward(g, ag::Softmax(out.log_posteriors));
      break;
    case EmbeddingKind::kSim:
      emb = up_sim_.Forward(g, out.shift);
      break;
  }
  DIMNET_CHECK_SHAPE(emb.cols() == emb_dim_, "accent embedding width mismatch");
  return detach ? g.Detach(emb) : emb;
}

ag::Var AccentLoss(const AccentOutput& out, int label,
                   const std::vector<double>& class_weights) {
  const ag::Var lp = out.log_posteriors;
  const int K = static_cast<int>(lp.cols());
  if (label < 0 || label >= K)
    Fail(ErrorCode::kIndexOutOfRange, "accent label " + std::to_string(label));
  const double w = class_weights.empty() ? 1.0 : class_weights.at(label);
  const auto T = lp.rows();
  ag::Mat loss(1, 1);
  loss(0, 0) = -w * lp.val().col(label).mean();
  ag::Graph* g = lp.graph();
  return g->Make(std::move(loss), {lp}, [lp, label, w, T](ag::Graph& gr, int self) {
    if (gr.requires_grad(lp.id()))
      gr.grad(lp.id()).col(label).array() -= w * gr.grad(self)(0, 0) / static_cast<double>(T);
  });
}

}  // namespace dimnet

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

#include "dimnet/attention_branch.h"

#include <cmath>
#include <string>

#include "dimnet/error.h"
#include "dimnet/triple_encoder.h"

namespace dimnet {

FusionRoute SchemeRoute(FusionScheme scheme) {
  switch (scheme) {
    case FusionScheme::kAfI: return {false, false};
    case FusionScheme::kAfIe: return {true, false};
    case FusionScheme::kAfId: return {false, true};
    case FusionScheme::kAfIed: return {true, true};
  }
  return {};
}

std::pair<std::optional<ag::Var>, std::optional<ag::Var>> ApplyScheme(
    FusionScheme scheme, std::optional<ag::Var> emb) {
  const FusionRoute r = SchemeRoute(scheme);
  if ((r.encoder || r.decoder) && !emb)
    Fail(ErrorCode::kConfig,
         std::string(FusionSchemeName(scheme)) + " requires an accent embedding");
  std::pair<std::optional<ag::Var>, std::optional<ag::Var>> slots;
  if (r.encoder) slots.first = emb;
  if (r.decoder) slots.second = emb;
  return slots;
}

ag::Var BuildMemory(ag::Var x_ae, std::optional<ag::Var> dec_emb) {
  return dec_emb ? ConcatEmbedding(x_ae, *dec_emb) : x_ae;
}

AttentionDecoder::AttentionDecoder(ag::ParamStore* store, const ModelConfig& cfg,
                                   int vocab, int memory_dim, nn::Rng* rng)
    : vocab_(vocab), memory_dim_(memory_dim), d_model_(cfg.d_model) {
  embed_ = store->Add("decoder.embed", vocab, cfg.d_model);
  nn::XavierUniform(&embed_->value, rng);
  for (int i = 0; i < cfg.dec_layers; ++i)
    layers_.emplace_back(store, "decoder." + std::to_string(i), cfg.dims(), memory_dim, rng);
  norm_ = nn::LayerNormLayer(store, "decoder.norm", cfg.d_model);
  out_ = nn::Linear(store, "decoder.out", cfg.d_model, vocab, true, rng);
}

ag::Var AttentionDecoder::Forward(ag::Graph& g, ag::Var memory,
                                  const std::vector<int>& ys_in) const {
  DIMNET_CHECK_SHAPE(!ys_in.empty(), "decoder input must start with <sos>");
  DIMNET_CHECK_SHAPE(memory.cols() == memory_dim_,
                     "decoder memory width " + std::to_string(memory.cols()) +
                         ", expected " + std::to_string(memory_dim_));
  const int L = static_cast<int>(ys_in.size());
  ag::Var x = ag::Scale(ag::GatherRows(g.Param(*embed_), ys_in),
                        std::sqrt(static_cast<double>(d_model_)));
  x = ag::Add(x, g.Constant(nn::PositionalEncoding(L, d_model_)));
  for (const auto& layer : layers_) x = layer.Forward(g, x, memory);
  return ag::LogSoftmax(out_.Forward(g, norm_.Forward(g, x)));
}

ag::Var AttentionLoss(ag::Var log_posteriors, const std::vector<int>& targets,
                      double smoothing) {
  const ag::Mat& lp = log_posteriors.val();
  const int L = static_cast<int>(lp.rows());
  const int V = static_cast<int>(lp.cols());
  DIMNET_CHECK_SHAPE(static_cast<int>(targets.size()) == L,
                     "attention targets must match decoder positions");
  double total = 0.0;
  for (int t = 0; t < L; ++t) {
    if (targets[t] < 0 || targets[t] >= V)
      Fail(ErrorCode::kIndexOutOfRange, "attention target " + std::to_string(targets[t]));
    total += -(1.0 - smoothing) * lp(t, targets[t]);
    if (smoothing != 0.0) total += -smoothing * lp.row(t).mean();
  }
  ag::Mat out(1, 1);
  out(0, 0) = total / L;
  ag::Graph* g = log_posteriors.graph();
  return g->Make(std::move(out), {log_posteriors},
                 [log_posteriors, targets, smoothing, L, V](ag::Graph& gr, int self) {
    if (!gr.requires_grad(log_posteriors.id())) return;
    const double go = gr.grad(self)(0, 0) / L;
    ag::Mat& gl = gr.grad(log_posteriors.id());
    if (smoothing != 0.0) gl.array() -= go * smoothing / V;
    for (int t = 0; t < L; ++t) gl(t, targets[t]) -= go * (1.0 - smoothing);
  });
}

}  // namespace dimnet

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

#include "dimnet/decoding.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "json.hpp"

#include "dimnet/ctc.h"
#include "dimnet/error.h"

namespace dimnet {

namespace {

struct Partial {
  std::vector<int> seq;  // without <sos>
  double logp = 0.0;
  bool ended = false;
};

double Ranked(const Partial& p, double lp) {
  return p.logp + lp * static_cast<double>(p.seq.size());
}

bool Before(const Partial& a, const Partial& b, double lp) {
  const double sa = Ranked(a, lp), sb = Ranked(b, lp);
  if (sa != sb) return sa > sb;
  return a.seq < b.seq;
}

}  // namespace

std::vector<Hypothesis> BeamSearch(StepScorer* scorer, const BeamOptions& opts) {
  if (opts.beam < 1) Fail(ErrorCode::kInvalidArgument, "beam must be >= 1");
  const int V = scorer->vocab();
  const int beam = opts.beam;
  const double lp = opts.length_penalty;
  std::vector<Partial> live(1);
  std::vector<Partial> done;

  while (!live.empty()) {
    std::vector<Partial> cand;
    cand.reserve(live.size() * V);
    for (const Partial& p : live) {
      std::vector<int> prefix = {opts.bos};
      prefix.insert(prefix.end(), p.seq.begin(), p.seq.end());
      Eigen::VectorXd logp = scorer->Step(prefix);
      const bool at_cap = static_cast<int>(p.seq.size()) >= opts.max_len;
      for (int v = 0; v < V; ++v) {
        if (v == opts.bos && opts.bos != opts.eos) continue;
        if (at_cap && v != opts.eos) continue;
        Partial c;
        c.seq = p.seq;
        c.logp = p.logp + logp(v);
        if (v == opts.eos) {
          c.ended = true;
        } else {
          c.seq.push_back(v);
        }
        cand.push_back(std::move(c));
      }
    }
    std::sort(cand.begin(), cand.end(),
              [lp](const Partial& a, const Partial& b) { return Before(a, b, lp); });
    if (static_cast<int>(cand.size()) > beam) cand.resize(beam);
    live.clear();
    for (Partial& c : cand) {
      if (c.ended) {
        done.push_back(std::move(c));
      } else {
        live.push_back(std::move(c));
      }
    }
    // Scores only fall as hypotheses grow, so once the beam is full of
    // finished entries better than every live one we can stop.
    if (lp == 0.0 && static_cast<int>(done.size()) >= beam && !live.empty()) {
      std::sort(done.begin(), done.end(),
                [lp](const Partial& a, const Partial& b) { return Before(a, b, lp); });
      if (done[beam - 1].logp > live.front().logp) live.clear();
    }
  }
  std::sort(done.begin(), done.end(),
            [lp](const Partial& a, const Partial& b) { return Before(a, b, lp); });
  if (static_cast<int>(done.size()) > beam) done.resize(beam);
  std::vector<Hypothesis> out;
  for (Partial& p : done) {
    Hypothesis h;
    h.y_c = std::move(p.seq);
    h.att_logp = p.logp;
    h.total = p.logp;
    out.push_back(std::move(h));
  }
  return out;
}

UniformLm::UniformLm(int vocab) {
  if (vocab < 1) Fail(ErrorCode::kInvalidArgument, "lm vocab must be >= 1");
  log_v_ = std::log(static_cast<double>(vocab));
}

double UniformLm::Score(const std::vector<int>& y_c) const {
  return -static_cast<double>(y_c.size() + 1) * log_v_;
}

std::unique_ptr<LmScorer> MakeLm(const std::string& name, int vocab) {
  if (name == "uniform") return std::make_unique<UniformLm>(vocab);
  if (name == "none") return nullptr;
  Fail(ErrorCode::kConfig, "unknown lm '" + name + "' (expected uniform|none)");
}

RescoreResult TwoGranularityRescore(std::vector<Hypothesis> hyps,
                                    const Eigen::MatrixXd& ctc_log_probs,
                                    int ctc_blank, const Lexicon* lexicon,
                                    const RescoreWeights& w, const LmScorer* lm) {
  if (w.w1 < 0 || w.w2 < 0 || w.w3 < 0)
    Fail(ErrorCode::kInvalidArgument, "rescoring weights must be nonnegative");
  RescoreResult r;
  for (Hypothesis& h : hyps) {
    h.lexicon_miss = false;
    std::vector<int> labels;
    bool ok = true;
    if (lexicon != nullptr) {
      try {
        labels = ExpandToFine(*lexicon, h.y_c);
      } catch (const LexiconMiss&) {
        ok = false;
        h.lexicon_miss = true;
        ++r.lexicon_misses;
      }
    } else {
      labels = h.y_c;
    }
    h.ctc_logp = ok ? ctc::Score(ctc_log_probs, labels, ctc_blank) : kNegInf;
    h.lm_logp = lm != nullptr ? lm->Score(h.y_c) : 0.0;
    double total = w.w1 * h.att_logp;
    if (w.w2 > 0) total += w.w2 * h.ctc_logp;
    if (w.w3 > 0) total += w.w3 * h.lm_logp;
    h.total = total;
  }
  r.scored = std::move(hyps);
  if (r.scored.empty()) return r;
  int best = -1;
  for (int i = 0; i < static_cast<int>(r.scored.size()); ++i) {
    const double t = r.scored[i].total;
    if (t == kNegInf || std::isnan(t)) continue;
    if (best < 0 || t > r.scored[best].total) best = i;
  }
  if (best < 0) {
    r.fallback = true;
    best = 0;
    for (int i = 1; i < static_cast<int>(r.scored.size()); ++i)
      if (r.scored[i].att_logp > r.scored[best].att_logp) best = i;
  }
  r.best = best;
  return r;
}

int DecoderStepScorer::vocab() const { return model_.decoder().vocab(); }

Eigen::VectorXd DecoderStepScorer::Step(const std::vector<int>& prefix) {
  ag::Graph g(false);
  ag::Var mem = g.Constant(memory_);
  ag::Var out = model_.DecoderForward(g, mem, prefix);
  return out.val().row(out.rows() - 1).transpose();
}

int MaxDecodeLength(int frames) { return 2 * frames + 5; }

UtteranceDecode DecodeUtterance(const DimNet& model, const Eigen::MatrixXd& frames,
                                const DecodeConfig& dc, const Lexicon& lexicon,
                                const LmScorer* lm) {
  ag::Graph g(false);
  EncodeResult enc = model.Encode(g, frames);
  UtteranceDecode d;
  d.accent_posterior = enc.accent.UtterancePosterior();
  d.accent_pred = enc.accent.Predict();
  d.ctc_greedy = ctc::Collapse(enc.greedy_frames, model.ctc_blank());

  const UnitInventory& inv = model.inventory();
  DecoderStepScorer scorer(model, enc.memory.val());
  BeamOptions bo;
  bo.beam = dc.beam;
  bo.bos = inv.bos_id();
  bo.eos = inv.eos_id();
  bo.max_len = MaxDecodeLength(static_cast<int>(enc.memory.rows()));
  bo.length_penalty = dc.length_penalty;
  std::vector<Hypothesis> first = BeamSearch(&scorer, bo);

  const bool two = model.config().model.units == UnitsMode::kTwoGranularity;
  RescoreResult r = TwoGranularityRescore(std::move(first), enc.ctc_log_probs.val(),
                                          model.ctc_blank(), two ? &lexicon : nullptr,
                                          {dc.w1, dc.w2, dc.w3}, lm);
  d.nbest = std::move(r.scored);
  d.best = r.best;
  d.fallback = r.fallback;
  d.lexicon_misses = r.lexicon_misses;
  return d;
}

namespace {

nlohmann::json JsonScore(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;  // -inf has no JSON spelling
}

}  // namespace

void WriteDecodeLine(std::ostream& os, const std::string& utt_id,
                     const UtteranceDecode& d) {
  nlohmann::ordered_json j;
  j["utt_id"] = utt_id;
  j["best"] = d.nbest.empty() ? std::vector<int>{} : d.Best().y_c;
  nlohmann::ordered_json nb = nlohmann::ordered_json::array();
  for (const Hypothesis& h : d.nbest) {
    nlohmann::ordered_json e;
    e["y_c"] = h.y_c;
    e["att_logp"] = JsonScore(h.att_logp);
    e["ctc_logp"] = JsonScore(h.ctc_logp);
    e["lm_logp"] = JsonScore(h.lm_logp);
    e["total"] = JsonScore(h.total);
    nb.push_back(std::move(e));
  }
  j["nbest"] = std::move(nb);
  if (d.fallback) j["fallback"] = true;
  os << j.dump() << '\n';
}

void WriteAccentPosteriorLine(std::ostream& os, const std::string& utt_id,
                              const UtteranceDecode& d) {
  nlohmann::ordered_json j;
  j["utt_id"] = utt_id;
  std::vector<double> p(d.accent_posterior.data(),
                        d.accent_posterior.data() + d.accent_posterior.size());
  j["posteriors"] = p;
  j["argmax"] = d.accent_pred;
  os << j.dump() << '\n';
}

}  // namespace dimnet

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

#ifndef DIMNET_DECODING_H_
#define DIMNET_DECODING_H_

#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimnet/config.h"
#include "dimnet/model.h"
#include "dimnet/vocab.h"

namespace dimnet {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Hypothesis {
  std::vector<int> y_c;
  double att_logp = 0.0;
  double ctc_logp = kNegInf;
  double lm_logp = 0.0;
  double total = 0.0;
  bool lexicon_miss = false;
};

// Next-token log distribution given a prefix that starts with <sos>.
class StepScorer {
 public:
  virtual ~StepScorer() = default;
  virtual int vocab() const = 0;
  virtual Eigen::VectorXd Step(const std::vector<int>& prefix) = 0;
};

struct BeamOptions {
  int beam = 5;
  int bos = 0;
  int eos = 1;
  int max_len = 10;  // cap on |y_c|; <eos> is forced afterwards
  double length_penalty = 0.0;
};

// Results sorted by score, ties broken by token sequence.
std::vector<Hypothesis> BeamSearch(StepScorer* scorer, const BeamOptions& opts);

class LmScorer {
 public:
  virtual ~LmScorer() = default;
  virtual double Score(const std::vector<int>& y_c) const = 0;
};

// Every token (and the final <eos>) costs log(vocab).
class UniformLm : public LmScorer {
 public:
  explicit UniformLm(int vocab);
  double Score(const std::vector<int>& y_c) const override;

 private:
  double log_v_;
};

std::unique_ptr<LmScorer> MakeLm(const std::string& name, int vocab);

struct RescoreWeights {
  double w1 = 1.0;
  double w2 = 0.3;
  double w3 = 0.0;
};

struct RescoreResult {
  int best = 0;                  // index into `scored`
  std::vector<Hypothesis> scored;  // first-pass order, scores filled
  bool fallback = false;         // every expansion infeasible
  int lexicon_misses = 0;
};

// `lexicon` == nullptr means the CTC labels are the coarse ids themselves.
RescoreResult TwoGranularityRescore(std::vector<Hypothesis> hyps,
                                    const Eigen::MatrixXd& ctc_log_probs,
                                    int ctc_blank, const Lexicon* lexicon,
                                    const RescoreWeights& w, const LmScorer* lm);

class DecoderStepScorer : public StepScorer {
 public:
  DecoderStepScorer(const DimNet& model, Eigen::MatrixXd memory)
      : model_(model), memory_(std::move(memory)) {}
  int vocab() const override;
  Eigen::VectorXd Step(const std::vector<int>& prefix) override;

 private:
  const DimNet& model_;
  Eigen::MatrixXd memory_;
};

struct UtteranceDecode {
  std::vector<Hypothesis> nbest;  // first-pass order
  int best = 0;
  bool fallback = false;
  int lexicon_misses = 0;
  std::vector<int> ctc_greedy;  // collapsed CTC output, CTC label space
  Eigen::VectorXd accent_posterior;
  int accent_pred = 0;
  const Hypothesis& Best() const { return nbest[best]; }
};

// First pass plus rescoring. The lexicon is only used with two-granularity
// units.
UtteranceDecode DecodeUtterance(const DimNet& model, const Eigen::MatrixXd& frames,
                                const DecodeConfig& dc, const Lexicon& lexicon,
                                const LmScorer* lm);
int MaxDecodeLength(int frames);

void WriteDecodeLine(std::ostream& os, const std::string& utt_id,
                     const UtteranceDecode& d);
void WriteAccentPosteriorLine(std::ostream& os, const std::string& utt_id,
                              const UtteranceDecode& d);

}  // namespace dimnet

#endif  // DIMNET_DECODING_H_

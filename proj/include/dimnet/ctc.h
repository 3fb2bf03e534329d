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

#ifndef DIMNET_CTC_H_
#define DIMNET_CTC_H_

#include <vector>

#include "dimnet/autograd.h"

namespace dimnet::ctc {

using ag::Mat;

// Minimum frame count for `labels`: |labels| plus adjacent repeats.
int MinFrames(const std::vector<int>& labels);

// log P(labels | log_probs) by the forward algorithm in log space; -inf
// when no alignment exists. With `grad`, also fills d(-log P)/d(log_probs)
// (zero when infeasible).
double LogLikelihood(const Mat& log_probs, const std::vector<int>& labels,
                     int blank, Mat* grad = nullptr);

struct LossResult {
  double loss = 0.0;  // +inf when infeasible
  bool feasible = true;
  Mat grad;  // w.r.t. log_probs
};

LossResult Loss(const Mat& log_probs, const std::vector<int>& labels, int blank);

// log P_ctc(hyp | x); -inf when infeasible.
double Score(const Mat& log_probs, const std::vector<int>& hyp, int blank);

// Per-frame argmax keeping blanks and repeats; ties go to the lowest index.
std::vector<int> GreedyFrames(const Mat& log_probs);

// Standard CTC collapse: merge repeats, then drop blanks.
std::vector<int> Collapse(const std::vector<int>& frame_ids, int blank);

// Replaces each blank with the next non-blank id; trailing blanks take the
// last non-blank id. Throws Error(kAllBlank) if every frame is blank.
std::vector<int> Regularize(const std::vector<int>& frame_ids, int blank);

// Regularize, but an all-blank input becomes `silence` on every frame and
// increments *all_blank_count.
std::vector<int> RegularizeOrSilence(const std::vector<int>& frame_ids,
                                     int blank, int silence,
                                     int* all_blank_count);

// Differentiable CTC loss node. An infeasible label yields +inf with no
// gradient and sets *feasible = false.
ag::Var LossVar(ag::Var log_probs, const std::vector<int>& labels, int blank,
                bool* feasible = nullptr);

}  // namespace dimnet::ctc

#endif  // DIMNET_CTC_H_

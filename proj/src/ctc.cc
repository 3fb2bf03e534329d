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

#include "dimnet/ctc.h"

#include <cmath>
#include <limits>

#include "dimnet/error.h"

namespace dimnet::ctc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

}  // namespace

int MinFrames(const std::vector<int>& labels) {
  int n = static_cast<int>(labels.size());
  for (size_t i = 1; i < labels.size(); ++i) n += labels[i] == labels[i - 1];
  return n;
}

double LogLikelihood(const Mat& log_probs, const std::vector<int>& labels,
                     int blank, Mat* grad) {
  const int T = static_cast<int>(log_probs.rows());
  const int V = static_cast<int>(log_probs.cols());
  for (int l : labels) {
    if (l < 0 || l >= V || l == blank)
      Fail(ErrorCode::kIndexOutOfRange, "CTC label " + std::to_string(l));
  }
  if (grad) *grad = Mat::Zero(T, V);
  if (T == 0) return labels.empty() ? 0.0 : kNegInf;
  if (T < MinFrames(labels)) return kNegInf;

  const int S = 2 * static_cast<int>(labels.size()) + 1;
  std::vector<int> ext(S);
  for (int s = 0; s < S; ++s) ext[s] = (s % 2 == 0) ? blank : labels[s / 2];
  auto can_skip = [&](int s) { return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2]; };

  Mat alpha = Mat::Constant(T, S, kNegInf);
  alpha(0, 0) = log_probs(0, ext[0]);
  if (S > 1) alpha(0, 1) = log_probs(0, ext[1]);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = LogAdd(a, alpha(t - 1, s - 1));
      if (can_skip(s)) a = LogAdd(a, alpha(t - 1, s - 2));
      alpha(t, s) = a == kNegInf ? kNegInf : a + log_probs(t, ext[s]);
    }
  }
  double logp = alpha(T - 1, S - 1);
  if (S > 1) logp = LogAdd(logp, alpha(T - 1, S - 2));
  if (logp == kNegInf || !grad) return logp;

  Mat beta = Mat::Constant(T, S, kNegInf);
  beta(T - 1, S - 1) = log_probs(T - 1, ext[S - 1]);
  if (S > 1) beta(T - 1, S - 2) = log_probs(T - 1, ext[S - 2]);
  for (int t = T - 2; t >= 0; --t) {
    for (int s = 0; s < S; ++s) {
      double b = beta(t + 1, s);
      if (s + 1 < S) b = LogAdd(b, beta(t + 1, s + 1));
      if (s + 2 < S && can_skip(s + 2)) b = LogAdd(b, beta(t + 1, s + 2));
      beta(t, s) = b == kNegInf ? kNegInf : b + log_probs(t, ext[s]);
    }
  }
  // d(-log P)/d(log y_t(k)) = -sum_{s: ext[s]=k} alpha*beta / (y_t(k) P)
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      const double ab = alpha(t, s) + beta(t, s);
      if (ab == kNegInf) continue;
      (*grad)(t, ext[s]) -= std::exp(ab - log_probs(t, ext[s]) - logp);
    }
  }
  return logp;
}

LossResult Loss(const Mat& log_probs, const std::vector<int>& labels, int blank) {
  LossResult r;
  const double logp = LogLikelihood(log_probs, labels, blank, &r.grad);
  if (logp == kNegInf) {
    r.feasible = false;
    r.loss = std::numeric_limits<double>::infinity();
    r.grad.setZero();
  } else {
    r.loss = -logp;
  }
  return r;
}

double Score(const Mat& log_probs, const std::vector<int>& hyp, int blank) {
  return LogLikelihood(log_probs, hyp, blank, nullptr);
}

std::vector<int> GreedyFrames(const Mat& log_probs) {
  std::vector<int> ids(log_probs.rows());
  for (Eigen::Index t = 0; t < log_probs.rows(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < log_probs.cols(); ++k) {
      if (log_probs(t, k) > log_probs(t, best)) best = k;
    }
    ids[t] = static_cast<int>(best);
  }
  return ids;
}

std::vector<int> Collapse(const std::vector<int>& frame_ids, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int id : frame_ids) {
    if (id != prev && id != blank) out.push_back(id);
    prev = id;
  }
  return out;
}

std::vector<int> Regularize(const std::vector<int>& frame_ids, int blank) {
  std::vector<int> out(frame_ids);
  int next = -1;
  for (int t = static_cast<int>(out.size()) - 1; t >= 0; --t) {
    if (out[t] != blank) {
      next = out[t];
    } else if (next >= 0) {
      out[t] = next;
    }
  }
  if (next < 0) Fail(ErrorCode::kAllBlank, "every frame is blank");
  // Trailing blanks (no following non-blank) take the last non-blank id.
  int prev = -1;
  for (int& id : out) {
    if (id != blank) {
      prev = id;
    } else {
      id = prev;
    }
  }
  return out;
}

std::vector<int> RegularizeOrSilence(const std::vector<int>& frame_ids,
                                     int blank, int silence,
                                     int* all_blank_count) {
  for (int id : frame_ids) {
    if (id != blank) return Regularize(frame_ids, blank);
  }
  if (all_blank_count) ++*all_blank_count;
  return std::vector<int>(frame_ids.size(), silence);
}

ag::Var LossVar(ag::Var log_probs, const std::vector<int>& labels, int blank,
                bool* feasible) {
  ag::Graph* g = log_probs.graph();
  LossResult r = Loss(log_probs.val(), labels, blank);
  if (feasible) *feasible = r.feasible;
  Mat out(1, 1);
  out(0, 0) = r.loss;
  if (!r.feasible) return g->Constant(out);
  return g->Make(std::move(out), {log_probs},
                 [log_probs, grad = std::move(r.grad)](ag::Graph& gr, int self) {
                   if (gr.requires_grad(log_probs.id()))
                     gr.grad(log_probs.id()) += gr.grad(self)(0, 0) * grad;
                 });
}

}  // namespace dimnet::ctc

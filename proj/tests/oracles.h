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

// Reference implementations used only by tests. Each one is written from the
// textbook definition and shares no code with the library routine it checks.

#ifndef DIMNET_TESTS_ORACLES_H_
#define DIMNET_TESTS_ORACLES_H_

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dimnet::oracle {

// Sum over every length-T path whose collapse (merge repeats, drop blanks)
// equals `label`, in the probability domain.
inline double CtcPathSum(const Eigen::MatrixXd& log_probs, const std::vector<int>& label,
                         int blank) {
  const int T = static_cast<int>(log_probs.rows());
  const int V = static_cast<int>(log_probs.cols());
  std::vector<int> path(T, 0);
  double total = 0.0;
  while (true) {
    std::vector<int> collapsed;
    int prev = -1;
    for (int t = 0; t < T; ++t) {
      if (path[t] != prev && path[t] != blank) collapsed.push_back(path[t]);
      prev = path[t];
    }
    if (collapsed == label) {
      double p = 1.0;
      for (int t = 0; t < T; ++t) p *= std::exp(log_probs(t, path[t]));
      total += p;
    }
    int k = T - 1;
    while (k >= 0 && path[k] == V - 1) path[k--] = 0;
    if (k < 0) break;
    ++path[k];
  }
  return total;
}

// Every blank takes the closest non-blank to its right; blanks with nothing
// to their right take the closest non-blank to their left. nullopt when the
// input has no non-blank at all.
inline std::optional<std::vector<int>> RegularRule(const std::vector<int>& frames, int blank) {
  const int T = static_cast<int>(frames.size());
  std::vector<int> out(frames);
  bool any = false;
  for (int f : frames) any = any || f != blank;
  if (!any) return std::nullopt;
  for (int i = 0; i < T; ++i) {
    if (frames[i] != blank) continue;
    int fill = -1;
    for (int j = i + 1; j < T && fill < 0; ++j)
      if (frames[j] != blank) fill = frames[j];
    for (int j = i - 1; j >= 0 && fill < 0; --j)
      if (frames[j] != blank) fill = frames[j];
    out[i] = fill;
  }
  return out;
}

// Exhaustive search over all token sequences of length <= max_len drawn from
// `tokens`, each terminated by `eos`. score(prefix) gives the next-token log
// distribution for a prefix that starts with bos.
struct SeqScore {
  std::vector<int> seq;
  double logp = -std::numeric_limits<double>::infinity();
};
inline SeqScore ExhaustiveBest(
    const std::function<Eigen::VectorXd(const std::vector<int>&)>& score,
    const std::vector<int>& tokens, int bos, int eos, int max_len) {
  SeqScore best;
  std::function<void(std::vector<int>&, double)> rec = [&](std::vector<int>& seq, double lp) {
    std::vector<int> prefix = {bos};
    prefix.insert(prefix.end(), seq.begin(), seq.end());
    Eigen::VectorXd next = score(prefix);
    const double end = lp + next(eos);
    if (end > best.logp || (end == best.logp && seq < best.seq)) best = {seq, end};
    if (static_cast<int>(seq.size()) == max_len) return;
    for (int v : tokens) {
      seq.push_back(v);
      rec(seq, lp + next(v));
      seq.pop_back();
    }
  };
  std::vector<int> empty;
  rec(empty, 0.0);
  return best;
}

// Plain forward recursion in the probability domain with per-frame
// renormalisation; returns log P(label).
inline double CtcForwardScaled(const Eigen::MatrixXd& log_probs, const std::vector<int>& label,
                               int blank) {
  const int T = static_cast<int>(log_probs.rows());
  std::vector<int> ext = {blank};
  for (int l : label) {
    ext.push_back(l);
    ext.push_back(blank);
  }
  const int S = static_cast<int>(ext.size());
  std::vector<double> a(S, 0.0), b(S, 0.0);
  double log_scale = 0.0;
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      double v;
      if (t == 0) {
        v = s < 2 ? 1.0 : 0.0;
      } else {
        v = a[s];
        if (s >= 1) v += a[s - 1];
        if (s >= 2 && ext[s] != blank && ext[s] != ext[s - 2]) v += a[s - 2];
      }
      b[s] = v * std::exp(log_probs(t, ext[s]));
    }
    double z = 0.0;
    for (double v : b) z += v;
    if (z == 0.0) return -std::numeric_limits<double>::infinity();
    for (int s = 0; s < S; ++s) a[s] = b[s] / z;
    log_scale += std::log(z);
  }
  double end = a[S - 1] + (S >= 2 ? a[S - 2] : 0.0);
  if (end == 0.0) return -std::numeric_limits<double>::infinity();
  return log_scale + std::log(end);
}

// Per-accent recall by straightforward counting.
inline std::map<int, double> RecallTally(const std::vector<int>& preds,
                                         const std::vector<int>& labels) {
  std::map<int, int> n, ok;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    n[labels[i]] += 1;
    if (preds[i] == labels[i]) ok[labels[i]] += 1;
  }
  std::map<int, double> out;
  for (auto& [k, c] : n) out[k] = static_cast<double>(ok[k]) / c;
  return out;
}

}  // namespace dimnet::oracle

#endif  // DIMNET_TESTS_ORACLES_H_

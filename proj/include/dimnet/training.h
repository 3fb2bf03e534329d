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

#ifndef DIMNET_TRAINING_H_
#define DIMNET_TRAINING_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dimnet/autograd.h"
#include "dimnet/config.h"
#include "dimnet/decoding.h"
#include "dimnet/metrics.h"
#include "dimnet/model.h"
#include "dimnet/synthgen.h"

namespace dimnet {

// Throws NumericsError naming the first non-finite branch.
double CombineLosses(double l_att, double l_ctc, double l_ar, const TrainConfig& t);

// Per-accent CE weights from the labeled training utterances.
std::vector<double> ClassWeights(const std::vector<Utterance>& train, int n_accents,
                                 ClassWeighting mode);

// Worker count from DIMNET_TOY_THREADS (default 1).
int ThreadCount();
// Runs fn(i) for i in [0, n); results must go to per-index slots.
void ParallelFor(int n, int threads, const std::function<void(int)>& fn);

class Adam {
 public:
  Adam(const ag::ParamStore& store, const TrainConfig& t);
  // One update with the learning rate of the current step.
  void Step(ag::ParamStore* store, const ag::GradBuffer& grad);
  double LearningRate(long step) const;
  long steps() const { return step_; }

 private:
  TrainConfig cfg_;
  long step_ = 0;
  std::vector<ag::Mat> m_, v_;
};

// Sum of per-utterance gradients, scaled by `scale`, accumulated in utterance
// order so the result does not depend on the worker count.
struct BatchStats {
  double att = 0, ctc = 0, ar = 0;
  int n = 0, n_ctc = 0, n_ar = 0;
  int ctc_infeasible = 0;
  int all_blank = 0;
};
BatchStats BatchGradient(const DimNet& model, const std::vector<const Utterance*>& batch,
                         const std::vector<double>& class_weights, double scale,
                         int threads, ag::GradBuffer* grad);

struct EvalResult {
  double wer = 0.0;
  double ar_acc = 0.0;
  double fine_per = 0.0;  // CTC greedy output vs y_f (or y_c when coarse-only)
  AccentAccuracyResult accent;
  std::vector<UtteranceDecode> decodes;
};

EvalResult Evaluate(const DimNet& model, const std::vector<Utterance>& utts,
                    const DecodeConfig& dc, const Lexicon& lexicon, int threads);

struct EpochMetrics {
  int epoch = 0;
  double l_att = 0, l_ctc = 0, l_ar = 0;
  double dev_wer = 0, dev_ar_acc = 0;
  int ctc_infeasible = 0;
  int all_blank = 0;
};

struct TrainOptions {
  std::string out_dir;  // empty: nothing written
  std::function<void(const EpochMetrics&)> on_epoch;
};

struct TrainResult {
  std::unique_ptr<DimNet> model;
  std::vector<EpochMetrics> epochs;
};

std::string EpochMetricsJson(const EpochMetrics& m);

// Writes <out>/config.txt, <out>/metrics.jsonl and <out>/model.ckpt (after
// every epoch, and once before the first). A non-finite loss aborts with
// NumericsError leaving the last good checkpoint in place.
TrainResult Train(const Corpus& data, const Config& cfg, const TrainOptions& opts);

struct AblationAxis {
  std::string key;
  std::vector<std::string> values;
};

struct AblationRun {
  std::vector<std::string> values;  // one per axis
  std::uint64_t seed = 0;
  double dev_wer = 0, dev_ar_acc = 0, test_wer = 0, test_ar_acc = 0;
};

struct AblationRow {
  std::vector<std::string> values;
  int n_seeds = 0;
  double dev_wer = 0, dev_ar_acc = 0, test_wer = 0, test_ar_acc = 0;
};

struct AblationResult {
  std::vector<AblationAxis> axes;
  std::vector<AblationRun> runs;
  std::vector<AblationRow> rows;
};

// Parses "key=v1,v2;key2=v3" into axes.
std::vector<AblationAxis> ParseGrid(const std::string& spec);

// Cartesian product of the axes, each point trained once per seed (the seed
// sets model.seed and train.seed).
AblationResult RunAblation(const Corpus& data, const Config& base,
                           const std::vector<AblationAxis>& axes,
                           const std::vector<std::uint64_t>& seeds,
                           const std::function<void(const AblationRun&)>& on_run = {});

// Columns: axis keys in order, then n_seeds,dev_ar_acc,dev_wer,test_ar_acc,test_wer.
void WriteAblationCsv(const std::string& path, const AblationResult& r);
// Same with a seed column instead of n_seeds, one line per run.
void WriteAblationRunsCsv(const std::string& path, const AblationResult& r);

}  // namespace dimnet

#endif  // DIMNET_TRAINING_H_

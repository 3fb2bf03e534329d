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

#ifndef DIMNET_PIPELINE_H_
#define DIMNET_PIPELINE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dimnet/config.h"
#include "dimnet/grad_check.h"
#include "dimnet/synthgen.h"
#include "dimnet/training.h"

namespace dimnet {

// A config as the user assembled it: the effective values plus the literal
// `key = value` lines (file first, then overrides) that produced them.
struct RunConfig {
  Config cfg;
  std::string applied;
  void Set(const std::string& key, const std::string& value);
  void Load(const std::string& path);
};

// Writes the effective config and the applied lines into `dir`.
void EchoConfig(const std::string& dir, const RunConfig& rc, const Config& effective);

Corpus LoadCorpus(const std::string& dir);

// gen-data: corpus directory from the corpus.* keys.
void GenData(const RunConfig& rc, const std::string& out_dir);

// train: <out>/model.ckpt and <out>/metrics.jsonl.
TrainResult TrainFromDir(const RunConfig& rc, const std::string& corpus_dir,
                         const std::string& out_dir);

// Loads a checkpoint; the applied lines are replayed over the stored config,
// and any change to a shape key is an error.
std::unique_ptr<DimNet> LoadModel(const std::string& ckpt_path, const RunConfig& rc);

// decode: <out>/decode.jsonl and <out>/accent_posteriors.jsonl.
EvalResult DecodeSplit(const RunConfig& rc, const std::string& ckpt_path,
                       const std::string& corpus_dir, const std::string& split,
                       const std::string& out_dir);

struct EvalSummary {
  EvalResult result;
  std::vector<AccentPhonemeReport> phonemes;
};

// eval: <out>/summary.csv, accent.csv, phoneme.csv, accent_words.csv.
// top_k <= 0 uses the planted-set size when the corpus records one.
EvalSummary EvalSplit(const RunConfig& rc, const std::string& ckpt_path,
                      const std::string& corpus_dir, const std::string& split,
                      const std::string& out_dir, int top_k = 0);

// Fine-side hypotheses used for phoneme analysis: the CTC output with
// two-granularity units, otherwise the lexicon expansion of the best y_c.
std::vector<std::vector<int>> FineHypotheses(const DimNet& model, const Lexicon& lexicon,
                                             const EvalResult& r);

// ablate: <out>/ablation.csv and <out>/ablation_runs.csv.
AblationResult AblateFromDir(const RunConfig& rc, const std::string& corpus_dir,
                             const std::string& grid, const std::vector<std::uint64_t>& seeds,
                             const std::string& out_dir);

}  // namespace dimnet

#endif  // DIMNET_PIPELINE_H_

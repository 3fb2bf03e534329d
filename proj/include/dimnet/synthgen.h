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

#ifndef DIMNET_SYNTHGEN_H_
#define DIMNET_SYNTHGEN_H_

// Synthetic accented corpus: every fine unit has an acoustic template, and
// each accent adds a fixed offset to the templates of a subset of units.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimnet/config.h"
#include "dimnet/vocab.h"

namespace dimnet {

struct Utterance {
  std::string utt_id;
  Eigen::MatrixXd frames;  // T x F, values representable as float32
  std::vector<int> y_f;
  std::vector<int> y_c;
  int accent = 0;  // -1 when the accent label is withheld
};

// Generator internals, exposed for diagnostics and tests.
struct GeneratorTables {
  Eigen::MatrixXd templates;                   // n_fine x F
  std::vector<Eigen::MatrixXd> accent_deltas;  // per accent, n_fine x F
  std::vector<std::vector<int>> accented_units;  // per accent, sorted fine ids
};

struct Corpus {
  UnitInventory inventory;
  Lexicon lexicon;
  GeneratorTables tables;
  std::vector<Utterance> train;
  std::vector<Utterance> dev;
  std::vector<Utterance> test;
  // Frames per fine unit, parallel to y_f, for each split.
  std::vector<std::vector<int>> train_durations;
  std::vector<std::vector<int>> dev_durations;
  std::vector<std::vector<int>> test_durations;
};

Corpus GenerateCorpus(const CorpusSpec& spec);

// Prefix-free random lexicon over the non-special fine units; no entry has
// adjacent repeats.
Lexicon GenerateLexicon(const UnitInventory& inv, std::uint64_t seed);
UnitInventory MakeInventory(int n_fine, int n_coarse);

// JSON lines with keys utt_id, frames|frames_path, y_f, y_c, accent. With a
// non-empty `feature_dir`, frames go to <feature_dir>/<utt_id>.feat and the
// record stores a path relative to the manifest directory.
void WriteManifest(const std::string& path, const std::vector<Utterance>& utts,
                   const std::string& feature_dir = "");
std::vector<Utterance> ReadManifest(const std::string& path);

// Little-endian int32 T, int32 F, then T*F float32 row-major.
void WriteFeatureFile(const std::string& path, const Eigen::MatrixXd& frames);
Eigen::MatrixXd ReadFeatureFile(const std::string& path);

// On-disk corpus directory: fine.txt, coarse.txt, lexicon.txt,
// {train,dev,test}.jsonl and accent_units.json.
struct CorpusDir {
  UnitInventory inventory;
  Lexicon lexicon;
  std::vector<std::vector<int>> accented_units;
};
void WriteCorpusDir(const std::string& dir, const Corpus& corpus,
                    bool external_features);
CorpusDir ReadCorpusDir(const std::string& dir);
std::vector<Utterance> ReadSplit(const std::string& dir, const std::string& split);

}  // namespace dimnet

#endif  // DIMNET_SYNTHGEN_H_

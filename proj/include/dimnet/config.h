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

#ifndef DIMNET_CONFIG_H_
#define DIMNET_CONFIG_H_

// Flat key = value configuration. Every key is typed and documented in the
// registry; unknown keys are rejected with the list of valid ones.

#include <cstdint>
#include <string>
#include <vector>

#include "dimnet/layers.h"

namespace dimnet {

enum class FusionScheme { kAfI, kAfIe, kAfId, kAfIed };
enum class EmbeddingKind { kDnn, kPp, kSim };
enum class AccentLevel { kFrame, kUtterance };
enum class UnitsMode { kTwoGranularity, kCoarseOnly };
enum class ClassWeighting { kNone, kRatioToLargest };

const char* FusionSchemeName(FusionScheme s);
FusionScheme ParseFusionScheme(const std::string& s);
const char* EmbeddingKindName(EmbeddingKind k);
EmbeddingKind ParseEmbeddingKind(const std::string& s);
const char* AccentLevelName(AccentLevel l);
AccentLevel ParseAccentLevel(const std::string& s);
const char* UnitsModeName(UnitsMode m);
UnitsMode ParseUnitsMode(const std::string& s);

struct CorpusSpec {
  int n_accents = 4;
  int n_fine = 12;
  int n_coarse = 40;
  int feat_dim = 16;
  int frames_per_unit_min = 2;
  int frames_per_unit_max = 4;
  int utt_len_min = 4;
  int utt_len_max = 10;
  double accent_shift_scale = 1.0;
  double accent_phoneme_fraction = 0.3;
  double noise_std = 0.5;
  // Accent marginals; empty means uniform.
  std::vector<double> accent_prior = {0.4, 0.3, 0.2, 0.1};
  int n_train = 2000;
  int n_dev = 200;
  int n_test = 200;
  // Fraction of utterances whose accent label is withheld (accent = -1).
  double unlabeled_fraction = 0.0;
  bool external_features = false;
  std::uint64_t seed = 1;
};

struct ModelConfig {
  nn::BlockKind block_kind = nn::BlockKind::kConformer;
  int d_model = 64;
  int ffn_dim = 128;
  int heads = 2;
  int conv_kernel = 7;
  int subsample = 2;
  int shared_layers = 3;
  int ctc_layers = 2;
  int att_layers = 2;
  int dec_layers = 2;
  bool triple_encoder = true;
  UnitsMode units = UnitsMode::kTwoGranularity;
  int lasas_spaces = 8;
  int lasas_width = 64;
  int lasas_dk = 16;
  int classifier_blocks = 2;
  AccentLevel ar_level = AccentLevel::kFrame;
  EmbeddingKind emb_kind = EmbeddingKind::kDnn;
  // Width of the classifier hidden layer and of every accent embedding.
  int emb_dim = 64;
  FusionScheme fusion = FusionScheme::kAfIed;
  // Stop-gradient on the accent embedding entering the ASR branch.
  bool detach = true;
  // Stop-gradient on the shared-encoder taps entering the accent branch.
  bool detach_taps = true;
  std::uint64_t seed = 1;

  nn::BlockDims dims() const {
    return {d_model, ffn_dim, heads, conv_kernel};
  }
};

struct TrainConfig {
  double w_att = 0.3;
  double w_ctc = 0.3;
  double w_ar = 0.4;
  int epochs = 10;
  int batch_size = 16;
  double lr = 2e-3;
  int warmup_steps = 200;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.98;
  double adam_eps = 1e-9;
  double grad_clip = 5.0;
  double label_smoothing = 0.1;
  ClassWeighting class_weights = ClassWeighting::kNone;
  int dev_beam = 1;
  std::uint64_t seed = 1;
};

struct DecodeConfig {
  int beam = 5;
  double w1 = 1.0;
  double w2 = 0.3;
  double w3 = 0.0;
  double length_penalty = 0.0;
  std::string lm = "uniform";
};

struct Config {
  CorpusSpec corpus;
  ModelConfig model;
  TrainConfig train;
  DecodeConfig decode;
};

void SetConfigKey(Config* cfg, const std::string& key, const std::string& value);
std::string GetConfigKey(const Config& cfg, const std::string& key);
std::vector<std::string> ConfigKeys();
// Applies `key = value` lines; '#' starts a comment.
void LoadConfigFile(const std::string& path, Config* cfg);
void ApplyConfigText(const std::string& text, Config* cfg,
                     const std::string& origin = "<text>");
// All keys in registry order, one `key = value` per line.
std::string ConfigToText(const Config& cfg);
// Only the keys that determine parameter shapes and the forward graph.
std::string ModelConfigText(const Config& cfg);
std::string DescribeConfigKeys();
void ValidateConfig(const Config& cfg);

}  // namespace dimnet

#endif  // DIMNET_CONFIG_H_

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

#include "dimnet/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "dimnet/error.h"

namespace dimnet {

const char* FusionSchemeName(FusionScheme s) {
  switch (s) {
    case FusionScheme::kAfI: return "AF_i";
    case FusionScheme::kAfIe: return "AF_ie";
    case FusionScheme::kAfId: return "AF_id";
    case FusionScheme::kAfIed: return "AF_ied";
  }
  return "?";
}

FusionScheme ParseFusionScheme(const std::string& s) {
  if (s == "AF_i") return FusionScheme::kAfI;
  if (s == "AF_ie") return FusionScheme::kAfIe;
  if (s == "AF_id") return FusionScheme::kAfId;
  if (s == "AF_ied") return FusionScheme::kAfIed;
  Fail(ErrorCode::kConfig, "unknown fusion scheme '" + s + "' (AF_i|AF_ie|AF_id|AF_ied)");
}

const char* EmbeddingKindName(EmbeddingKind k) {
  switch (k) {
    case EmbeddingKind::kDnn: return "dnn";
    case EmbeddingKind::kPp: return "pp";
    case EmbeddingKind::kSim: return "sim";
  }
  return "?";
}

EmbeddingKind ParseEmbeddingKind(const std::string& s) {
  if (s == "dnn") return EmbeddingKind::kDnn;
  if (s == "pp") return EmbeddingKind::kPp;
  if (s == "sim") return EmbeddingKind::kSim;
  Fail(ErrorCode::kConfig, "unknown embedding kind '" + s + "' (dnn|pp|sim)");
}

const char* AccentLevelName(AccentLevel l) {
  return l == AccentLevel::kFrame ? "frame" : "utterance";
}

AccentLevel ParseAccentLevel(const std::string& s) {
  if (s == "frame") return AccentLevel::kFrame;
  if (s == "utterance") return AccentLevel::kUtterance;
  Fail(ErrorCode::kConfig, "unknown accent level '" + s + "' (frame|utterance)");
}

const char* UnitsModeName(UnitsMode m) {
  return m == UnitsMode::kTwoGranularity ? "two_granularity" : "coarse_only";
}

UnitsMode ParseUnitsMode(const std::string& s) {
  if (s == "two_granularity") return UnitsMode::kTwoGranularity;
  if (s == "coarse_only") return UnitsMode::kCoarseOnly;
  Fail(ErrorCode::kConfig, "unknown units mode '" + s + "' (two_granularity|coarse_only)");
}

namespace {

struct KeyDef {
  std::string name;
  std::string type;
  std::string doc;
  bool model_shape;
  std::function<std::string(const Config&)> get;
  std::function<void(Config*, const std::string&)> set;
};

std::string Trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

long long ToInt(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    Fail(ErrorCode::kConfig, key + ": expected integer, got '" + v + "'");
  }
}

double ToDouble(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    Fail(ErrorCode::kConfig, key + ": expected number, got '" + v + "'");
  }
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  Fail(ErrorCode::kConfig, key + ": expected true/false, got '" + v + "'");
}

// Shortest text that parses back to the same double.
std::string FmtDouble(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

std::string FmtList(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += FmtDouble(v[i]);
  }
  return s;
}

std::vector<double> ToList(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(ToDouble(key, item));
  }
  return out;
}

#define INT_KEY(NAME, FIELD, SHAPE, DOC)                                      \
  KeyDef{NAME, "int", DOC, SHAPE,                                             \
         [](const Config& c) { return std::to_string(c.FIELD); },            \
         [](Config* c, const std::string& v) {                               \
           c->FIELD = static_cast<decltype(c->FIELD)>(ToInt(NAME, v));        \
         }}
#define DBL_KEY(NAME, FIELD, SHAPE, DOC)                                      \
  KeyDef{NAME, "float", DOC, SHAPE,                                           \
         [](const Config& c) { return FmtDouble(c.FIELD); },                 \
         [](Config* c, const std::string& v) { c->FIELD = ToDouble(NAME, v); }}
#define BOOL_KEY(NAME, FIELD, SHAPE, DOC)                                     \
  KeyDef{NAME, "bool", DOC, SHAPE,                                            \
         [](const Config& c) { return std::string(c.FIELD ? "true" : "false"); }, \
         [](Config* c, const std::string& v) { c->FIELD = ToBool(NAME, v); }}
#define ENUM_KEY(NAME, FIELD, SHAPE, DOC, FMT, PARSE)                         \
  KeyDef{NAME, "enum", DOC, SHAPE,                                            \
         [](const Config& c) { return std::string(FMT(c.FIELD)); },          \
         [](Config* c, const std::string& v) { c->FIELD = PARSE(v); }}

const char* ClassWeightingName(ClassWeighting w) {
  return w == ClassWeighting::kNone ? "none" : "ratio_to_largest";
}
ClassWeighting ParseClassWeighting(const std::string& s) {
  if (s == "none") return ClassWeighting::kNone;
  if (s == "ratio_to_largest") return ClassWeighting::kRatioToLargest;
  Fail(ErrorCode::kConfig, "unknown class weighting '" + s + "' (none|ratio_to_largest)");
}

const std::vector<KeyDef>& Registry() {
  static const std::vector<KeyDef> keys = {
      INT_KEY("corpus.n_accents", corpus.n_accents, true, "number of accents"),
      INT_KEY("corpus.n_fine", corpus.n_fine, true, "fine inventory size incl. <blank> and <sil>"),
      INT_KEY("corpus.n_coarse", corpus.n_coarse, true, "coarse inventory size incl. <sos> <eos> <unk>"),
      INT_KEY("corpus.feat_dim", corpus.feat_dim, true, "acoustic feature dimension"),
      INT_KEY("corpus.frames_per_unit_min", corpus.frames_per_unit_min, false, "min frames per fine unit"),
      INT_KEY("corpus.frames_per_unit_max", corpus.frames_per_unit_max, false, "max frames per fine unit"),
      INT_KEY("corpus.utt_len_min", corpus.utt_len_min, false, "min coarse tokens per utterance"),
      INT_KEY("corpus.utt_len_max", corpus.utt_len_max, false, "max coarse tokens per utterance"),
      DBL_KEY("corpus.accent_shift_scale", corpus.accent_shift_scale, false, "norm of each accent perturbation"),
      DBL_KEY("corpus.accent_phoneme_fraction", corpus.accent_phoneme_fraction, false, "fraction of phonemes each accent perturbs"),
      DBL_KEY("corpus.noise_std", corpus.noise_std, false, "per-dimension Gaussian frame noise"),
      KeyDef{"corpus.accent_prior", "list", "comma-separated accent marginals (empty = uniform)", false,
             [](const Config& c) { return FmtList(c.corpus.accent_prior); },
             [](Config* c, const std::string& v) { c->corpus.accent_prior = ToList("corpus.accent_prior", v); }},
      INT_KEY("corpus.n_train", corpus.n_train, false, "train utterances"),
      INT_KEY("corpus.n_dev", corpus.n_dev, false, "dev utterances"),
      INT_KEY("corpus.n_test", corpus.n_test, false, "test utterances"),
      DBL_KEY("corpus.unlabeled_fraction", corpus.unlabeled_fraction, false, "fraction of utterances without accent label"),
      BOOL_KEY("corpus.external_features", corpus.external_features, false, "store frames in binary feature files"),
      INT_KEY("corpus.seed", corpus.seed, false, "corpus RNG seed"),

      ENUM_KEY("model.block_kind", model.block_kind, true, "encoder block kind (feedforward|self_attention|conformer)",
               nn::BlockKindName, nn::ParseBlockKind),
      INT_KEY("model.d_model", model.d_model, true, "model width"),
      INT_KEY("model.ffn_dim", model.ffn_dim, true, "FFN inner width"),
      INT_KEY("model.heads", model.heads, true, "attention heads"),
      INT_KEY("model.conv_kernel", model.conv_kernel, true, "depthwise conv kernel (odd)"),
      INT_KEY("model.subsample", model.subsample, true, "front-end frame stacking factor"),
      INT_KEY("model.shared_layers", model.shared_layers, true, "shared encoder blocks"),
      INT_KEY("model.ctc_layers", model.ctc_layers, true, "CTC encoder blocks"),
      INT_KEY("model.att_layers", model.att_layers, true, "attention encoder blocks"),
      INT_KEY("model.dec_layers", model.dec_layers, true, "attention decoder layers"),
      BOOL_KEY("model.triple_encoder", model.triple_encoder, true, "per-branch encoders after the shared encoder"),
      ENUM_KEY("model.units", model.units, true, "two_granularity|coarse_only", UnitsModeName, ParseUnitsMode),
      INT_KEY("model.lasas_spaces", model.lasas_spaces, true, "LASAS mapping spaces N"),
      INT_KEY("model.lasas_width", model.lasas_width, true, "bimodal width C (> N)"),
      INT_KEY("model.lasas_dk", model.lasas_dk, true, "per-space mapped width d_k"),
      INT_KEY("model.classifier_blocks", model.classifier_blocks, true, "self-attention blocks in the accent classifier"),
      ENUM_KEY("model.ar_level", model.ar_level, true, "accent loss level (frame|utterance)", AccentLevelName, ParseAccentLevel),
      ENUM_KEY("model.emb_kind", model.emb_kind, true, "accent embedding (dnn|pp|sim)", EmbeddingKindName, ParseEmbeddingKind),
      INT_KEY("model.emb_dim", model.emb_dim, true, "accent embedding / classifier hidden width"),
      ENUM_KEY("model.fusion", model.fusion, true, "AF_i|AF_ie|AF_id|AF_ied", FusionSchemeName, ParseFusionScheme),
      BOOL_KEY("model.detach", model.detach, true, "stop gradients through the accent embedding"),
      BOOL_KEY("model.detach_taps", model.detach_taps, true, "stop gradients through the acoustic taps into the accent branch"),
      INT_KEY("model.seed", model.seed, false, "parameter init seed"),

      DBL_KEY("train.w_att", train.w_att, false, "attention loss weight"),
      DBL_KEY("train.w_ctc", train.w_ctc, false, "CTC loss weight"),
      DBL_KEY("train.w_ar", train.w_ar, false, "accent loss weight"),
      INT_KEY("train.epochs", train.epochs, false, "training epochs"),
      INT_KEY("train.batch_size", train.batch_size, false, "utterances per update"),
      DBL_KEY("train.lr", train.lr, false, "peak learning rate"),
      INT_KEY("train.warmup_steps", train.warmup_steps, false, "linear warmup steps, then inverse-sqrt decay"),
      DBL_KEY("train.adam_beta1", train.adam_beta1, false, "Adam beta1"),
      DBL_KEY("train.adam_beta2", train.adam_beta2, false, "Adam beta2"),
      DBL_KEY("train.adam_eps", train.adam_eps, false, "Adam epsilon"),
      DBL_KEY("train.grad_clip", train.grad_clip, false, "global gradient norm clip (0 = off)"),
      DBL_KEY("train.label_smoothing", train.label_smoothing, false, "attention CE label smoothing"),
      ENUM_KEY("train.class_weights", train.class_weights, false, "accent CE weights (none|ratio_to_largest)",
               ClassWeightingName, ParseClassWeighting),
      INT_KEY("train.dev_beam", train.dev_beam, false, "beam used for per-epoch dev WER"),
      INT_KEY("train.seed", train.seed, false, "shuffling seed"),

      INT_KEY("decode.beam", decode.beam, false, "first-pass beam size"),
      DBL_KEY("decode.w1", decode.w1, false, "attention score weight"),
      DBL_KEY("decode.w2", decode.w2, false, "fine CTC score weight"),
      DBL_KEY("decode.w3", decode.w3, false, "LM score weight"),
      DBL_KEY("decode.length_penalty", decode.length_penalty, false, "per-token bonus added to the total"),
      KeyDef{"decode.lm", "enum", "LM scorer (uniform|none)", false,
             [](const Config& c) { return c.decode.lm; },
             [](Config* c, const std::string& v) {
               if (v != "uniform" && v != "none")
                 Fail(ErrorCode::kConfig, "decode.lm: expected uniform|none");
               c->decode.lm = v;
             }},
  };
  return keys;
}

const KeyDef& Lookup(const std::string& key) {
  for (const auto& k : Registry()) {
    if (k.name == key) return k;
  }
  std::string valid;
  for (const auto& k : Registry()) valid += "\n  " + k.name;
  Fail(ErrorCode::kConfig, "unknown config key '" + key + "'; valid keys:" + valid);
}

}  // namespace

void SetConfigKey(Config* cfg, const std::string& key, const std::string& value) {
  Lookup(Trim(key)).set(cfg, Trim(value));
}

std::string GetConfigKey(const Config& cfg, const std::string& key) {
  return Lookup(Trim(key)).get(cfg);
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> out;
  for (const auto& k : Registry()) out.push_back(k.name);
  return out;
}

void ApplyConfigText(const std::string& text, Config* cfg, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      Fail(ErrorCode::kConfig, origin + ":" + std::to_string(lineno) + ": expected key = value");
    SetConfigKey(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

void LoadConfigFile(const std::string& path, Config* cfg) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  ApplyConfigText(ss.str(), cfg, path);
}

std::string ConfigToText(const Config& cfg) {
  std::string out;
  for (const auto& k : Registry()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

std::string ModelConfigText(const Config& cfg) {
  std::string out;
  for (const auto& k : Registry()) {
    if (k.model_shape) out += k.name + " = " + k.get(cfg) + "\n";
  }
  return out;
}

std::string DescribeConfigKeys() {
  std::string out;
  const Config defaults;
  for (const auto& k : Registry()) {
    out += "  " + k.name + " (" + k.type + ", default " + k.get(defaults) + ")\n      " +
           k.doc + "\n";
  }
  return out;
}

void ValidateConfig(const Config& cfg) {
  const auto& c = cfg.corpus;
  auto bad = [](const std::string& m) { Fail(ErrorCode::kConfig, m); };
  if (c.n_fine < 4) bad("corpus.n_fine must be >= 4");
  if (c.n_accents < 2) bad("corpus.n_accents must be >= 2");
  if (c.n_coarse <= c.n_fine) bad("corpus.n_coarse must exceed corpus.n_fine");
  if (c.utt_len_max <= 0 || c.utt_len_min < 1 || c.utt_len_min > c.utt_len_max)
    bad("corpus.utt_len range is degenerate");
  if (c.frames_per_unit_min < 1 || c.frames_per_unit_min > c.frames_per_unit_max)
    bad("corpus.frames_per_unit range is degenerate");
  if (c.accent_phoneme_fraction <= 0.0 || c.accent_phoneme_fraction > 1.0)
    bad("corpus.accent_phoneme_fraction must lie in (0, 1]");
  if (c.accent_phoneme_fraction * c.n_fine < 1.0)
    bad("corpus.accent_phoneme_fraction * n_fine must be >= 1");
  if (c.noise_std < 0.0 || c.accent_shift_scale < 0.0) bad("corpus noise/shift must be >= 0");
  if (!c.accent_prior.empty() && static_cast<int>(c.accent_prior.size()) != c.n_accents)
    bad("corpus.accent_prior needs one entry per accent");
  for (double p : c.accent_prior)
    if (p < 0.0) bad("corpus.accent_prior entries must be >= 0");
  if (c.feat_dim < 1) bad("corpus.feat_dim must be >= 1");

  const auto& m = cfg.model;
  if (m.d_model < 1 || m.ffn_dim < 1) bad("model widths must be positive");
  if (m.heads < 1 || m.d_model % m.heads != 0) bad("model.d_model must be divisible by model.heads");
  if (m.subsample < 1) bad("model.subsample must be >= 1");
  if (m.shared_layers < 1) bad("model.shared_layers must be >= 1");
  if (m.ctc_layers < 0 || m.att_layers < 0 || m.dec_layers < 1) bad("model layer counts invalid");
  if (m.lasas_spaces < 1) bad("model.lasas_spaces must be >= 1");
  if (m.lasas_width <= m.lasas_spaces) bad("model.lasas_width must exceed model.lasas_spaces");
  if (m.lasas_dk < 1) bad("model.lasas_dk must be >= 1");
  if (m.lasas_width % m.heads != 0) bad("model.lasas_width must be divisible by model.heads");
  if (m.emb_dim < 1) bad("model.emb_dim must be >= 1");

  const auto& t = cfg.train;
  if (t.w_att < 0 || t.w_ctc < 0 || t.w_ar < 0) bad("loss weights must be nonnegative");
  if (t.w_att + t.w_ctc + t.w_ar <= 0) bad("at least one loss weight must be positive");
  if (t.batch_size < 1) bad("train.batch_size must be >= 1");
  if (t.epochs < 0) bad("train.epochs must be >= 0");
  if (t.dev_beam < 1) bad("train.dev_beam must be >= 1");

  const auto& d = cfg.decode;
  if (d.beam < 1) bad("decode.beam must be >= 1");
  if (d.w1 < 0 || d.w2 < 0 || d.w3 < 0) bad("decode weights must be nonnegative");
}

}  // namespace dimnet

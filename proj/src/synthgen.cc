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

#include "dimnet/synthgen.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "dimnet/error.h"
#include "json.hpp"

namespace dimnet {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

bool IsPrefix(const std::vector<int>& a, const std::vector<int>& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

double RoundToFloat(double x) { return static_cast<double>(static_cast<float>(x)); }

struct SplitOut {
  std::vector<Utterance> utts;
  std::vector<std::vector<int>> durations;
};

SplitOut GenerateSplit(const CorpusSpec& spec, const Lexicon& lex,
                       const GeneratorTables& tables, const std::string& name,
                       int split_index, int count) {
  std::seed_seq seq{static_cast<std::uint64_t>(spec.seed),
                    static_cast<std::uint64_t>(split_index), std::uint64_t{0x5eed}};
  std::mt19937_64 rng(seq);
  const UnitInventory& inv = lex.inventory();
  std::vector<double> prior = spec.accent_prior;
  if (prior.empty()) prior.assign(spec.n_accents, 1.0);
  std::discrete_distribution<int> accent_dist(prior.begin(), prior.end());
  std::uniform_int_distribution<int> len_dist(spec.utt_len_min, spec.utt_len_max);
  std::uniform_int_distribution<int> word_dist(3, inv.size(Side::kCoarse) - 1);
  std::uniform_int_distribution<int> dur_dist(spec.frames_per_unit_min,
                                              spec.frames_per_unit_max);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  SplitOut out;
  out.utts.reserve(count);
  for (int n = 0; n < count; ++n) {
    Utterance u;
    char id[64];
    std::snprintf(id, sizeof(id), "%s-%06d", name.c_str(), n);
    u.utt_id = id;
    const int accent = accent_dist(rng);
    const bool unlabeled = spec.unlabeled_fraction > 0.0 && unif(rng) < spec.unlabeled_fraction;
    u.accent = unlabeled ? -1 : accent;
    const int n_words = len_dist(rng);
    for (int w = 0; w < n_words; ++w) {
      int word = 0;
      for (int tries = 0;; ++tries) {
        word = word_dist(rng);
        const auto& e = *lex.Entry(word);
        if (u.y_f.empty() || e.front() != u.y_f.back() || tries > 1000) break;
      }
      u.y_c.push_back(word);
      const auto& e = *lex.Entry(word);
      u.y_f.insert(u.y_f.end(), e.begin(), e.end());
    }
    std::vector<int> durs;
    int total = 0;
    for (size_t i = 0; i < u.y_f.size(); ++i) {
      durs.push_back(dur_dist(rng));
      total += durs.back();
    }
    u.frames.resize(total, spec.feat_dim);
    int t = 0;
    for (size_t i = 0; i < u.y_f.size(); ++i) {
      const int f = u.y_f[i];
      for (int k = 0; k < durs[i]; ++k, ++t) {
        for (int d = 0; d < spec.feat_dim; ++d) {
          double v = tables.templates(f, d);
          if (!unlabeled) v += tables.accent_deltas[accent](f, d);
          v += spec.noise_std * noise(rng);
          u.frames(t, d) = RoundToFloat(v);
        }
      }
    }
    out.utts.push_back(std::move(u));
    out.durations.push_back(std::move(durs));
  }
  return out;
}

std::vector<int> JsonIntList(const Json& j, const char* key, int line) {
  if (!j.contains(key) || !j[key].is_array()) throw ParseError(line, std::string("missing array ") + key);
  std::vector<int> out;
  for (const auto& v : j[key]) {
    if (!v.is_number_integer()) throw ParseError(line, std::string("non-integer in ") + key);
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace

UnitInventory MakeInventory(int n_fine, int n_coarse) {
  std::vector<std::string> fine = {kBlankToken, kSilenceToken};
  for (int i = 0; i < n_fine - 2; ++i) fine.push_back("p" + std::to_string(i));
  std::vector<std::string> coarse = {kBosToken, kEosToken, kUnkToken};
  for (int i = 0; i < n_coarse - 3; ++i) coarse.push_back("w" + std::to_string(i));
  return UnitInventory(std::move(fine), std::move(coarse));
}

Lexicon GenerateLexicon(const UnitInventory& inv, std::uint64_t seed) {
  const int first_phone = inv.silence_id() >= 0 ? inv.silence_id() + 1 : 1;
  const int n_fine = inv.size(Side::kFine);
  const int n_words = inv.size(Side::kCoarse) - 3;
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 17);
  std::uniform_int_distribution<int> phone(first_phone, n_fine - 1);
  std::discrete_distribution<int> length({0.1, 0.6, 0.3});

  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<std::vector<int>> words;
    for (int tries = 0; tries < 20000 && static_cast<int>(words.size()) < n_words; ++tries) {
      const int len = length(rng) + 1;
      std::vector<int> w;
      while (static_cast<int>(w.size()) < len) {
        int p = phone(rng);
        if (!w.empty() && p == w.back()) {
          if (n_fine - first_phone < 2) break;
          continue;
        }
        w.push_back(p);
      }
      if (static_cast<int>(w.size()) != len) continue;
      bool ok = true;
      for (const auto& o : words) {
        if (IsPrefix(o, w) || IsPrefix(w, o)) {
          ok = false;
          break;
        }
      }
      if (ok) words.push_back(std::move(w));
    }
    if (static_cast<int>(words.size()) == n_words) {
      Lexicon lex(inv);
      for (int i = 0; i < n_words; ++i) lex.Set(3 + i, words[i]);
      return lex;
    }
  }
  Fail(ErrorCode::kConfig, "cannot build a prefix-free lexicon with " +
                               std::to_string(n_words) + " words over " +
                               std::to_string(n_fine - first_phone) + " units");
}

Corpus GenerateCorpus(const CorpusSpec& spec) {
  Config probe;
  probe.corpus = spec;
  ValidateConfig(probe);

  Corpus c;
  c.inventory = MakeInventory(spec.n_fine, spec.n_coarse);
  c.lexicon = GenerateLexicon(c.inventory, spec.seed);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int first_phone = c.inventory.silence_id() + 1;
  const int n_phones = spec.n_fine - first_phone;
  c.tables.templates = Eigen::MatrixXd::Zero(spec.n_fine, spec.feat_dim);
  for (int f = first_phone; f < spec.n_fine; ++f)
    for (int d = 0; d < spec.feat_dim; ++d) c.tables.templates(f, d) = normal(rng);

  const int per_accent = std::clamp(
      static_cast<int>(std::lround(spec.accent_phoneme_fraction * n_phones)), 1, n_phones);
  std::vector<int> phones(n_phones);
  for (int i = 0; i < n_phones; ++i) phones[i] = first_phone + i;
  for (int a = 0; a < spec.n_accents; ++a) {
    std::shuffle(phones.begin(), phones.end(), rng);
    std::vector<int> chosen(phones.begin(), phones.begin() + per_accent);
    std::sort(chosen.begin(), chosen.end());
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(spec.n_fine, spec.feat_dim);
    for (int f : chosen) {
      Eigen::VectorXd dir(spec.feat_dim);
      for (int d = 0; d < spec.feat_dim; ++d) dir(d) = normal(rng);
      delta.row(f) = (spec.accent_shift_scale / dir.norm()) * dir.transpose();
    }
    c.tables.accent_deltas.push_back(std::move(delta));
    c.tables.accented_units.push_back(std::move(chosen));
  }

  auto tr = GenerateSplit(spec, c.lexicon, c.tables, "train", 0, spec.n_train);
  auto dv = GenerateSplit(spec, c.lexicon, c.tables, "dev", 1, spec.n_dev);
  auto te = GenerateSplit(spec, c.lexicon, c.tables, "test", 2, spec.n_test);
  c.train = std::move(tr.utts);
  c.train_durations = std::move(tr.durations);
  c.dev = std::move(dv.utts);
  c.dev_durations = std::move(dv.durations);
  c.test = std::move(te.utts);
  c.test_durations = std::move(te.durations);
  return c;
}

void WriteFeatureFile(const std::string& path, const Eigen::MatrixXd& frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  auto put32 = [&](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  put32(static_cast<std::uint32_t>(frames.rows()));
  put32(static_cast<std::uint32_t>(frames.cols()));
  for (Eigen::Index r = 0; r < frames.rows(); ++r) {
    for (Eigen::Index c = 0; c < frames.cols(); ++c) {
      float f = static_cast<float>(frames(r, c));
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put32(bits);
    }
  }
}

Eigen::MatrixXd ReadFeatureFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  auto get32 = [&]() {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) Fail(ErrorCode::kIo, "truncated feature file " + path);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  };
  const auto rows = static_cast<std::int32_t>(get32());
  const auto cols = static_cast<std::int32_t>(get32());
  if (rows < 0 || cols < 0) Fail(ErrorCode::kIo, "bad header in " + path);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      std::uint32_t bits = get32();
      float f;
      std::memcpy(&f, &bits, 4);
      m(r, c) = f;
    }
  }
  return m;
}

void WriteManifest(const std::string& path, const std::vector<Utterance>& utts,
                   const std::string& feature_dir) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  const fs::path base = fs::path(path).parent_path();
  if (!feature_dir.empty()) fs::create_directories(feature_dir);
  for (const auto& u : utts) {
    Json j;
    j["utt_id"] = u.utt_id;
    if (feature_dir.empty()) {
      Json frames = Json::array();
      for (Eigen::Index r = 0; r < u.frames.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < u.frames.cols(); ++c) row.push_back(u.frames(r, c));
        frames.push_back(std::move(row));
      }
      j["frames"] = std::move(frames);
    } else {
      fs::path feat = fs::path(feature_dir) / (u.utt_id + ".feat");
      WriteFeatureFile(feat.string(), u.frames);
      j["frames_path"] = fs::relative(feat, base.empty() ? fs::path(".") : base).generic_string();
    }
    j["y_f"] = u.y_f;
    j["y_c"] = u.y_c;
    j["accent"] = u.accent;
    out << j.dump() << '\n';
  }
}

std::vector<Utterance> ReadManifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open manifest " + path);
  const fs::path base = fs::path(path).parent_path();
  std::vector<Utterance> utts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(lineno, "record is not an object");
    Utterance u;
    if (!j.contains("utt_id") || !j["utt_id"].is_string()) throw ParseError(lineno, "missing utt_id");
    u.utt_id = j["utt_id"].get<std::string>();
    if (j.contains("frames")) {
      const auto& fr = j["frames"];
      if (!fr.is_array()) throw ParseError(lineno, "frames is not an array");
      const Eigen::Index T = static_cast<Eigen::Index>(fr.size());
      const Eigen::Index F = T > 0 && fr[0].is_array() ? static_cast<Eigen::Index>(fr[0].size()) : 0;
      u.frames.resize(T, F);
      for (Eigen::Index r = 0; r < T; ++r) {
        if (!fr[r].is_array() || static_cast<Eigen::Index>(fr[r].size()) != F)
          throw ParseError(lineno, "ragged frames");
        for (Eigen::Index c = 0; c < F; ++c) {
          if (!fr[r][c].is_number()) throw ParseError(lineno, "non-numeric frame value");
          u.frames(r, c) = fr[r][c].get<double>();
        }
      }
    } else if (j.contains("frames_path") && j["frames_path"].is_string()) {
      fs::path p = j["frames_path"].get<std::string>();
      if (p.is_relative()) p = base / p;
      u.frames = ReadFeatureFile(p.string());
    } else {
      throw ParseError(lineno, "missing frames or frames_path");
    }
    u.y_f = JsonIntList(j, "y_f", lineno);
    u.y_c = JsonIntList(j, "y_c", lineno);
    if (!j.contains("accent") || !j["accent"].is_number_integer())
      throw ParseError(lineno, "missing accent");
    u.accent = j["accent"].get<int>();
    utts.push_back(std::move(u));
  }
  return utts;
}

void WriteCorpusDir(const std::string& dir, const Corpus& corpus, bool external_features) {
  fs::create_directories(dir);
  const fs::path d(dir);
  corpus.inventory.Write((d / "fine.txt").string(), (d / "coarse.txt").string());
  corpus.lexicon.Write((d / "lexicon.txt").string());
  const std::string feats = external_features ? (d / "feats").string() : "";
  WriteManifest((d / "train.jsonl").string(), corpus.train, feats);
  WriteManifest((d / "dev.jsonl").string(), corpus.dev, feats);
  WriteManifest((d / "test.jsonl").string(), corpus.test, feats);
  Json truth = Json::object();
  Json sets = Json::array();
  for (const auto& s : corpus.tables.accented_units) sets.push_back(s);
  truth["accented_units"] = std::move(sets);
  std::ofstream out(d / "accent_units.json", std::ios::binary);
  out << truth.dump() << '\n';
}

CorpusDir ReadCorpusDir(const std::string& dir) {
  const fs::path d(dir);
  CorpusDir out;
  out.inventory = UnitInventory::Read((d / "fine.txt").string(), (d / "coarse.txt").string());
  out.lexicon = Lexicon::Read((d / "lexicon.txt").string(), out.inventory);
  std::ifstream in(d / "accent_units.json");
  if (in) {
    Json j = Json::parse(in, nullptr, false);
    if (!j.is_discarded() && j.contains("accented_units"))
      out.accented_units = j["accented_units"].get<std::vector<std::vector<int>>>();
  }
  return out;
}

std::vector<Utterance> ReadSplit(const std::string& dir, const std::string& split) {
  return ReadManifest((fs::path(dir) / (split + ".jsonl")).string());
}

}  // namespace dimnet

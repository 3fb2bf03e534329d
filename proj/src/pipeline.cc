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

#include "dimnet/pipeline.h"

#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "dimnet/checkpoint.h"
#include "dimnet/error.h"

namespace dimnet {

namespace fs = std::filesystem;

void RunConfig::Set(const std::string& key, const std::string& value) {
  SetConfigKey(&cfg, key, value);
  applied += key + " = " + value + "\n";
}

void RunConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot read config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ApplyConfigText(text, &cfg, path);
  applied += text;
  if (!text.empty() && text.back() != '\n') applied += "\n";
}

void EchoConfig(const std::string& dir, const RunConfig& rc, const Config& effective) {
  fs::create_directories(dir);
  std::ofstream(fs::path(dir) / "config.txt") << ConfigToText(effective);
  std::ofstream(fs::path(dir) / "overrides.txt") << rc.applied;
}

Corpus LoadCorpus(const std::string& dir) {
  if (!fs::is_directory(dir)) Fail(ErrorCode::kIo, "missing corpus directory: " + dir);
  CorpusDir cd = ReadCorpusDir(dir);
  Corpus c;
  c.inventory = cd.inventory;
  c.lexicon = cd.lexicon;
  c.tables.accented_units = cd.accented_units;
  c.train = ReadSplit(dir, "train");
  c.dev = ReadSplit(dir, "dev");
  c.test = ReadSplit(dir, "test");
  return c;
}

void GenData(const RunConfig& rc, const std::string& out_dir) {
  ValidateConfig(rc.cfg);
  Corpus c = GenerateCorpus(rc.cfg.corpus);
  WriteCorpusDir(out_dir, c, rc.cfg.corpus.external_features);
  EchoConfig(out_dir, rc, rc.cfg);
}

namespace {

void CheckCorpusMatches(const Corpus& c, const Config& cfg) {
  if (c.inventory.size(Side::kFine) != cfg.corpus.n_fine ||
      c.inventory.size(Side::kCoarse) != cfg.corpus.n_coarse)
    Fail(ErrorCode::kConfig, "corpus inventories (" +
                                 std::to_string(c.inventory.size(Side::kFine)) + " fine, " +
                                 std::to_string(c.inventory.size(Side::kCoarse)) +
                                 " coarse) disagree with corpus.n_fine/corpus.n_coarse");
  for (const auto* split : {&c.train, &c.dev, &c.test}) {
    for (const Utterance& u : *split) {
      if (u.frames.cols() != cfg.corpus.feat_dim)
        Fail(ErrorCode::kConfig, u.utt_id + ": feature width " +
                                     std::to_string(u.frames.cols()) +
                                     " != corpus.feat_dim");
      if (u.accent >= cfg.corpus.n_accents)
        Fail(ErrorCode::kConfig, u.utt_id + ": accent label beyond corpus.n_accents");
    }
  }
}

const std::vector<Utterance>& SplitOf(const Corpus& c, const std::string& split) {
  if (split == "train") return c.train;
  if (split == "dev") return c.dev;
  if (split == "test") return c.test;
  Fail(ErrorCode::kInvalidArgument, "unknown split '" + split + "' (train|dev|test)");
}

}  // namespace

TrainResult TrainFromDir(const RunConfig& rc, const std::string& corpus_dir,
                         const std::string& out_dir) {
  Corpus c = LoadCorpus(corpus_dir);
  CheckCorpusMatches(c, rc.cfg);
  EchoConfig(out_dir, rc, rc.cfg);
  TrainOptions o;
  o.out_dir = out_dir;
  return Train(c, rc.cfg, o);
}

std::unique_ptr<DimNet> LoadModel(const std::string& ckpt_path, const RunConfig& rc) {
  Checkpoint ckpt = LoadCheckpoint(ckpt_path);
  Config eff;
  ApplyConfigText(ckpt.config_text, &eff, ckpt_path);
  ApplyConfigText(rc.applied, &eff, "overrides");
  return RestoreModel(ckpt, &eff);
}

EvalResult DecodeSplit(const RunConfig& rc, const std::string& ckpt_path,
                       const std::string& corpus_dir, const std::string& split,
                       const std::string& out_dir) {
  auto model = LoadModel(ckpt_path, rc);
  Corpus c = LoadCorpus(corpus_dir);
  const std::vector<Utterance>& utts = SplitOf(c, split);
  EchoConfig(out_dir, rc, model->config());
  EvalResult r = Evaluate(*model, utts, model->config().decode, c.lexicon, ThreadCount());
  std::ofstream dec(fs::path(out_dir) / "decode.jsonl");
  std::ofstream post(fs::path(out_dir) / "accent_posteriors.jsonl");
  if (!dec || !post) Fail(ErrorCode::kIo, "cannot write decode output in " + out_dir);
  for (size_t i = 0; i < utts.size(); ++i) {
    WriteDecodeLine(dec, utts[i].utt_id, r.decodes[i]);
    WriteAccentPosteriorLine(post, utts[i].utt_id, r.decodes[i]);
  }
  return r;
}

std::vector<std::vector<int>> FineHypotheses(const DimNet& model, const Lexicon& lexicon,
                                             const EvalResult& r) {
  std::vector<std::vector<int>> out;
  const bool two = model.config().model.units == UnitsMode::kTwoGranularity;
  for (const UtteranceDecode& d : r.decodes) {
    if (two) {
      out.push_back(d.ctc_greedy);
      continue;
    }
    std::vector<int> f;
    if (!d.nbest.empty()) {
      for (int w : d.Best().y_c) {
        try {
          for (int p : ExpandToFine(lexicon, std::vector<int>{w})) f.push_back(p);
        } catch (const LexiconMiss&) {
        }
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

EvalSummary EvalSplit(const RunConfig& rc, const std::string& ckpt_path,
                      const std::string& corpus_dir, const std::string& split,
                      const std::string& out_dir, int top_k) {
  auto model = LoadModel(ckpt_path, rc);
  Corpus c = LoadCorpus(corpus_dir);
  const std::vector<Utterance>& utts = SplitOf(c, split);
  EchoConfig(out_dir, rc, model->config());
  EvalSummary s;
  s.result = Evaluate(*model, utts, model->config().decode, c.lexicon, ThreadCount());

  PhonemeReportInput in;
  in.hyps_f = FineHypotheses(*model, c.lexicon, s.result);
  for (size_t i = 0; i < utts.size(); ++i) {
    in.refs_f.push_back(utts[i].y_f);
    in.refs_c.push_back(utts[i].y_c);
    in.hyps_c.push_back(s.result.decodes[i].nbest.empty() ? std::vector<int>{}
                                                         : s.result.decodes[i].Best().y_c);
    in.accents.push_back(utts[i].accent);
  }
  if (top_k <= 0) top_k = c.tables.accented_units.empty()
                              ? 3
                              : static_cast<int>(c.tables.accented_units.front().size());
  s.phonemes = PerPhonemeReport(in, top_k, &c.lexicon);

  long subs = 0, dels = 0, ins = 0, ref = 0;
  for (size_t i = 0; i < utts.size(); ++i) {
    EditResult e = EditErrorRate(in.refs_c[i], in.hyps_c[i]);
    subs += e.subs;
    dels += e.dels;
    ins += e.ins;
    ref += e.ref_len;
  }
  const fs::path d(out_dir);
  {
    std::ofstream os(d / "summary.csv");
    if (!os) Fail(ErrorCode::kIo, "cannot write " + (d / "summary.csv").string());
    os << "split,n_utts,wer,subs,dels,ins,ref_len,fine_per,ar_acc\n";
    os << split << ',' << utts.size() << ',' << s.result.wer << ',' << subs << ',' << dels
       << ',' << ins << ',' << ref << ',' << s.result.fine_per << ',' << s.result.ar_acc << '\n';
  }
  WriteAccentCsv((d / "accent.csv").string(), s.result.accent);
  WritePhonemeCsv((d / "phoneme.csv").string(), s.phonemes, &c.inventory);
  {
    std::ofstream os(d / "accent_words.csv");
    os << "accent,n_utts,top_phonemes,top_word_wer,word_wer\n";
    for (const AccentPhonemeReport& r : s.phonemes) {
      std::string tops;
      for (const TokenStat& t : r.top) {
        if (!tops.empty()) tops += ' ';
        tops += c.inventory.tokens(Side::kFine)[t.token];
      }
      os << r.accent << ',' << r.n_utts << ',' << tops << ',' << r.top_word_wer << ','
         << r.word_wer << '\n';
    }
  }
  return s;
}

AblationResult AblateFromDir(const RunConfig& rc, const std::string& corpus_dir,
                             const std::string& grid, const std::vector<std::uint64_t>& seeds,
                             const std::string& out_dir) {
  Corpus c = LoadCorpus(corpus_dir);
  CheckCorpusMatches(c, rc.cfg);
  std::vector<AblationAxis> axes = ParseGrid(grid);
  EchoConfig(out_dir, rc, rc.cfg);
  const fs::path d(out_dir);
  AblationResult r = RunAblation(c, rc.cfg, axes, seeds);
  WriteAblationCsv((d / "ablation.csv").string(), r);
  WriteAblationRunsCsv((d / "ablation_runs.csv").string(), r);
  return r;
}

}  // namespace dimnet

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

// Drives the dimnet_toy executable and the C interface it is built on.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"

#include "dimnet/dimnet.h"

namespace {

namespace fs = std::filesystem;

struct Proc {
  int code = -1;
  std::string out;  // stdout and stderr together
};

Proc Exec(const std::string& args) {
  const std::string cmd = std::string(DIMNET_TOY_BIN) + " " + args + " 2>&1";
  Proc r;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Fresh(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("dimnet_cli_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

// Small enough that a full pipeline runs in a few seconds.
const char* kSmall =
    "--set corpus.n_train=24 --set corpus.n_dev=6 --set corpus.n_test=6 "
    "--set model.d_model=16 --set model.ffn_dim=32 --set model.lasas_width=16 "
    "--set model.emb_dim=16 --set model.shared_layers=3 --set model.ctc_layers=1 "
    "--set model.att_layers=1 --set model.dec_layers=1 --set train.batch_size=8";

std::map<std::string, std::string> Tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = Slurp(e.path());
  return files;
}

TEST(Cli, FullPipelineSmoke) {
  const std::string dir = Fresh("smoke");
  const std::string small = kSmall;
  Proc g = Exec(small + " gen-data --out " + dir + "/data");
  ASSERT_EQ(g.code, 0) << g.out;
  for (const char* f : {"train.jsonl", "dev.jsonl", "test.jsonl", "fine.txt", "coarse.txt",
                        "lexicon.txt", "config.txt", "overrides.txt"})
    EXPECT_TRUE(fs::exists(dir + "/data/" + f)) << f;
  Proc t = Exec(small + " train --data " + dir + "/data --out " + dir + "/run --epochs 1");
  ASSERT_EQ(t.code, 0) << t.out;
  for (const char* f : {"model.ckpt", "metrics.jsonl", "config.txt", "overrides.txt"})
    EXPECT_TRUE(fs::exists(dir + "/run/" + f)) << f;
  EXPECT_NE(Slurp(dir + "/run/overrides.txt").find("train.epochs = 1"), std::string::npos);
  Proc d = Exec("decode --ckpt " + dir + "/run/model.ckpt --data " + dir + "/data --split dev --out " +
               dir + "/dec");
  ASSERT_EQ(d.code, 0) << d.out;
  EXPECT_TRUE(fs::exists(dir + "/dec/decode.jsonl"));
  EXPECT_TRUE(fs::exists(dir + "/dec/accent_posteriors.jsonl"));
  Proc e = Exec("eval --ckpt " + dir + "/run/model.ckpt --data " + dir + "/data --split test --out " +
               dir + "/ev");
  ASSERT_EQ(e.code, 0) << e.out;
  for (const char* f : {"summary.csv", "accent.csv", "phoneme.csv", "accent_words.csv",
                        "config.txt"})
    EXPECT_TRUE(fs::exists(dir + "/ev/" + f)) << f;
  std::ifstream dec(dir + "/dec/decode.jsonl");
  std::string line;
  int n = 0;
  while (std::getline(dec, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("utt_id") && j.contains("best") && j.contains("nbest"));
    ++n;
  }
  EXPECT_EQ(n, 6);
}

TEST(Cli, GenDataSeedIsDeterministic) {
  const std::string dir = Fresh("gen_seed");
  const std::string small = kSmall;
  ASSERT_EQ(Exec(small + " gen-data --seed 7 --out " + dir + "/a").code, 0);
  ASSERT_EQ(Exec(small + " gen-data --seed 7 --out " + dir + "/b").code, 0);
  ASSERT_EQ(Exec(small + " gen-data --seed 8 --out " + dir + "/c").code, 0);
  auto a = Tree(dir + "/a");
  EXPECT_EQ(a, Tree(dir + "/b"));
  EXPECT_NE(a.at("train.jsonl"), Tree(dir + "/c").at("train.jsonl"));
  EXPECT_NE(a.at("config.txt").find("corpus.seed = 7"), std::string::npos) << a.at("config.txt");
}

TEST(Cli, DecodeWithoutCtcWeightIsFirstPass) {
  const std::string dir = Fresh("w2");
  const std::string small = kSmall;
  ASSERT_EQ(Exec(small + " gen-data --out " + dir + "/data").code, 0);
  ASSERT_EQ(Exec(small + " train --data " + dir + "/data --out " + dir + "/run --epochs 1").code, 0);
  const std::string base = "decode --ckpt " + dir + "/run/model.ckpt --data " + dir +
                           "/data --split dev --beam 4 ";
  ASSERT_EQ(Exec(base + "--w2 0 --w3 0 --out " + dir + "/single").code, 0);
  ASSERT_EQ(Exec(base + "--w2 0 --out " + dir + "/w2zero").code, 0);
  ASSERT_EQ(Exec(base + "--w2 0.7 --out " + dir + "/two").code, 0);
  std::ifstream s(dir + "/single/decode.jsonl"), z(dir + "/w2zero/decode.jsonl"),
      t(dir + "/two/decode.jsonl");
  std::string ls, lz, lt;
  while (std::getline(s, ls) && std::getline(z, lz) && std::getline(t, lt)) {
    auto js = nlohmann::json::parse(ls), jz = nlohmann::json::parse(lz),
         jt = nlohmann::json::parse(lt);
    EXPECT_EQ(js["best"], js["nbest"][0]["y_c"]);
    EXPECT_EQ(jz["best"], js["best"]);
    ASSERT_EQ(jt["nbest"].size(), js["nbest"].size());
    for (size_t i = 0; i < js["nbest"].size(); ++i)
      EXPECT_EQ(jt["nbest"][i]["y_c"], js["nbest"][i]["y_c"]);
  }
}

TEST(Cli, UnknownKeyListsValidKeys) {
  const std::string dir = Fresh("badkey");
  Proc r = Exec("--set model.no_such_key=3 gen-data --out " + dir + "/x");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("model.no_such_key"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("model.fusion"), std::string::npos) << r.out;
  std::ofstream(dir + "/bad.cfg") << "corpus.n_train = 5\nbogus = 1\n";
  Proc f = Exec("--config " + dir + "/bad.cfg gen-data --out " + dir + "/y");
  EXPECT_NE(f.code, 0);
  EXPECT_NE(f.out.find("bogus"), std::string::npos) << f.out;
}

TEST(Cli, MissingCheckpointFailsWithOneLine) {
  const std::string dir = Fresh("nockpt");
  Proc r = Exec("decode --ckpt " + dir + "/absent.ckpt --data " + dir + " --out " + dir + "/o");
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(r.out.rfind("dimnet_toy: ", 0), 0u) << r.out;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1) << r.out;
}

TEST(Cli, ConfigFileThenOverrides) {
  const std::string dir = Fresh("cfgfile");
  std::ofstream(dir + "/run.cfg") << "# toy\ncorpus.n_train = 11\ncorpus.n_dev = 3\n"
                                     "corpus.n_test = 2\n";
  ASSERT_EQ(Exec("--config " + dir + "/run.cfg --set corpus.n_dev=4 gen-data --out " + dir + "/d")
                .code,
            0);
  std::string cfg = Slurp(dir + "/d/config.txt");
  EXPECT_NE(cfg.find("corpus.n_train = 11"), std::string::npos);
  EXPECT_NE(cfg.find("corpus.n_dev = 4"), std::string::npos);
  int lines = 0;
  std::ifstream in(dir + "/d/dev.jsonl");
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 4);
}

TEST(Cli, GradCheckPrintsMaxError) {
  Proc r = Exec("grad-check");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("max relative error"), std::string::npos);
}

TEST(Cli, HelpDocumentsKeys) {
  Proc r = Exec("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("decode.w2"), std::string::npos);
  EXPECT_NE(r.out.find("DIMNET_TOY_THREADS"), std::string::npos);
}

// C interface.

TEST(CApi, ConfigRoundTripAndErrors) {
  dimnet_config* cfg = nullptr;
  ASSERT_EQ(dimnet_config_new(&cfg), DIMNET_OK);
  EXPECT_EQ(dimnet_config_set(cfg, "model.fusion", "AF_id"), DIMNET_OK);
  size_t need = 0;
  EXPECT_EQ(dimnet_config_get(cfg, "model.fusion", nullptr, 0, &need), DIMNET_OK);
  std::string buf(need, '\0');
  EXPECT_EQ(dimnet_config_get(cfg, "model.fusion", buf.data(), buf.size(), &need), DIMNET_OK);
  EXPECT_STREQ(buf.c_str(), "AF_id");
  EXPECT_EQ(dimnet_config_set(cfg, "nope", "1"), DIMNET_E_CONFIG);
  EXPECT_NE(std::string(dimnet_last_error()).find("valid keys"), std::string::npos)
      << dimnet_last_error();
  EXPECT_EQ(dimnet_config_set(cfg, "model.heads", "abc"), DIMNET_E_CONFIG);
  EXPECT_EQ(dimnet_config_set(cfg, "train.w_att", "0"), DIMNET_OK);
  EXPECT_EQ(dimnet_config_set(cfg, "train.w_ctc", "0"), DIMNET_OK);
  EXPECT_EQ(dimnet_config_set(cfg, "train.w_ar", "0"), DIMNET_OK);
  EXPECT_EQ(dimnet_config_validate(cfg), DIMNET_E_CONFIG);
  EXPECT_STREQ(dimnet_status_name(DIMNET_E_LEXICON_MISS), "LexiconMiss");
  dimnet_config_free(cfg);
}

TEST(CApi, ModelLoadDecodeAndMissingCheckpoint) {
  const std::string dir = Fresh("capi");
  dimnet_config* cfg = nullptr;
  ASSERT_EQ(dimnet_config_new(&cfg), DIMNET_OK);
  std::istringstream sets(kSmall);
  for (std::string flag, kv; sets >> flag >> kv;) {
    const auto eq = kv.find('=');
    ASSERT_EQ(dimnet_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()),
              DIMNET_OK);
  }
  ASSERT_EQ(dimnet_config_set(cfg, "train.epochs", "1"), DIMNET_OK);
  ASSERT_EQ(dimnet_gen_data(cfg, (dir + "/data").c_str()), DIMNET_OK) << dimnet_last_error();
  ASSERT_EQ(dimnet_train(cfg, (dir + "/data").c_str(), (dir + "/run").c_str()), DIMNET_OK)
      << dimnet_last_error();
  dimnet_model* m = nullptr;
  EXPECT_EQ(dimnet_model_load((dir + "/missing.ckpt").c_str(), nullptr, &m), DIMNET_E_IO);
  ASSERT_EQ(dimnet_model_load((dir + "/run/model.ckpt").c_str(), nullptr, &m), DIMNET_OK)
      << dimnet_last_error();
  int64_t n = 0;
  EXPECT_EQ(dimnet_model_num_params(m, &n), DIMNET_OK);
  EXPECT_GT(n, 1000);
  std::vector<float> frames(10 * 16, 0.25f);
  size_t len = 0;
  int32_t accent = -1;
  ASSERT_EQ(dimnet_model_decode(m, frames.data(), 10, 16, nullptr, 0, &len, &accent), DIMNET_OK)
      << dimnet_last_error();
  std::vector<int32_t> best(len + 1);
  ASSERT_EQ(dimnet_model_decode(m, frames.data(), 10, 16, best.data(), best.size(), &len, &accent),
            DIMNET_OK);
  EXPECT_GE(accent, 0);
  EXPECT_LT(accent, 4);
  EXPECT_EQ(dimnet_model_decode(m, frames.data(), 10, 15, best.data(), best.size(), &len, &accent),
            DIMNET_E_SHAPE);
  double wer = -1, acc = -1;
  EXPECT_EQ(dimnet_eval(cfg, (dir + "/run/model.ckpt").c_str(), (dir + "/data").c_str(), "dev",
                        (dir + "/ev").c_str(), 0, &wer, &acc),
            DIMNET_OK)
      << dimnet_last_error();
  EXPECT_GE(wer, 0.0);
  EXPECT_GE(acc, 0.0);
  EXPECT_LE(acc, 1.0);
  dimnet_model_free(m);
  dimnet_config_free(cfg);
}

}  // namespace

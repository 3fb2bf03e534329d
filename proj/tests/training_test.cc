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

#include "dimnet/training.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"

#include "dimnet/checkpoint.h"
#include "dimnet/error.h"
#include "dimnet/synthgen.h"
#include "test_util.h"

namespace dimnet {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Restores DIMNET_TOY_THREADS on scope exit.
class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) {
    const char* old = std::getenv("DIMNET_TOY_THREADS");
    had_ = old != nullptr;
    if (had_) old_ = old;
    if (value) {
      setenv("DIMNET_TOY_THREADS", value, 1);
    } else {
      unsetenv("DIMNET_TOY_THREADS");
    }
  }
  ~ThreadsEnv() {
    if (had_) {
      setenv("DIMNET_TOY_THREADS", old_.c_str(), 1);
    } else {
      unsetenv("DIMNET_TOY_THREADS");
    }
  }

 private:
  bool had_ = false;
  std::string old_;
};

TEST(CombineLosses, WeightedSum) {
  TrainConfig t;
  t.w_att = 1.0;
  EXPECT_NEAR(CombineLosses(1.0, 2.0, 3.0, t), 2.8, 1e-15);
  TrainConfig d;  // defaults (0.3, 0.3, 0.4)
  EXPECT_NEAR(CombineLosses(1.0, 2.0, 3.0, d), 2.1, 1e-15);
}

TEST(CombineLosses, NonFiniteNamesBranch) {
  TrainConfig t;
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  struct Case {
    double a, c, r;
    const char* branch;
  } cases[] = {{nan, 1, 1, "attention"}, {1, inf, 1, "ctc"}, {1, 1, -inf, "accent"}};
  for (const Case& k : cases) {
    try {
      CombineLosses(k.a, k.c, k.r, t);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNumerics);
      EXPECT_NE(std::string(e.what()).find(k.branch), std::string::npos) << e.what();
    }
  }
}

TEST(Adam, WarmupThenInverseSqrt) {
  TrainConfig t;
  t.lr = 1e-3;
  t.warmup_steps = 100;
  ag::ParamStore store;
  Adam adam(store, t);
  EXPECT_DOUBLE_EQ(adam.LearningRate(100), 1e-3);
  EXPECT_DOUBLE_EQ(adam.LearningRate(50), 5e-4);
  EXPECT_DOUBLE_EQ(adam.LearningRate(400), 5e-4);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  TrainConfig t;
  t.lr = 0.01;
  t.warmup_steps = 0;
  ag::ParamStore store;
  ag::Parameter* p = store.Add("p", 1, 3);
  Adam adam(store, t);
  ag::GradBuffer g(store);
  g.at(0) << 2.0, -0.5, 0.0;
  adam.Step(&store, g);
  EXPECT_NEAR(p->value(0, 0), -0.01, 1e-9);
  EXPECT_NEAR(p->value(0, 1), 0.01, 1e-9);
  EXPECT_EQ(p->value(0, 2), 0.0);
}

TEST(ThreadCount, ParsesEnvironment) {
  {
    ThreadsEnv env(nullptr);
    EXPECT_EQ(ThreadCount(), 1);
  }
  {
    ThreadsEnv env("3");
    EXPECT_EQ(ThreadCount(), 3);
  }
  {
    ThreadsEnv env("zero");
    EXPECT_THROW(ThreadCount(), Error);
  }
}

struct TinySetup {
  Config cfg = testing::TinyConfig(4);
  Corpus corpus = GenerateCorpus(cfg.corpus);
};

TEST(Gradients, TotalIsWeightedSumOfBranches) {
  TinySetup s;
  s.cfg.model.detach = false;
  s.cfg.model.detach_taps = false;
  DimNet model(s.cfg, s.corpus.inventory);
  std::mt19937_64 rng(1);
  testing::Jitter(&model.params(), &rng, 0.05);
  const TrainConfig& t = s.cfg.train;
  for (int u = 0; u < 3; ++u) {
    auto grads = [&](int which) {
      ag::Graph g;
      LossTerms l = model.Losses(g, s.corpus.train[u], {});
      ag::Var v = which == 0 ? l.total : which == 1 ? l.att : which == 2 ? l.ctc : l.ar;
      return testing::GradientsOf(model.params(), g, v);
    };
    ag::GradBuffer total = grads(0), att = grads(1), ctc = grads(2), ar = grads(3);
    ag::GradBuffer sum(model.params());
    sum.Add(att, t.w_att);
    sum.Add(ctc, t.w_ctc);
    sum.Add(ar, t.w_ar);
    for (int i = 0; i < total.size(); ++i) {
      const double scale = std::max(1e-30, total.at(i).cwiseAbs().maxCoeff());
      EXPECT_LE((total.at(i) - sum.at(i)).cwiseAbs().maxCoeff() / scale, 1e-10)
          << model.params().at(i).name;
    }
  }
}

TEST(Gradients, AttentionOnlyLeavesCtcAndAccentUntouched) {
  TinySetup s;
  s.cfg.train.w_ctc = 0.0;
  s.cfg.train.w_ar = 0.0;
  DimNet model(s.cfg, s.corpus.inventory);
  ag::Graph g;
  LossTerms l = model.Losses(g, s.corpus.train[0], {});
  ag::GradBuffer gb = testing::GradientsOf(model.params(), g, l.total);
  for (int i = 0; i < gb.size(); ++i) {
    const std::string& n = model.params().at(i).name;
    if (n.rfind("accent.", 0) == 0 || n.rfind("ctc", 0) == 0)
      EXPECT_EQ(gb.at(i).cwiseAbs().maxCoeff(), 0.0) << n;
  }
  EXPECT_GT(gb.at(model.params().Find("decoder.out.weight")->index).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Gradients, UnlabeledAccentMasksArLoss) {
  TinySetup s;
  DimNet model(s.cfg, s.corpus.inventory);
  Utterance u = s.corpus.train[0];
  u.accent = -1;
  ag::Graph g;
  LossTerms l = model.Losses(g, u, {});
  EXPECT_FALSE(l.ar_active);
  ag::GradBuffer gb = testing::GradientsOf(model.params(), g, l.total);
  for (int i = 0; i < gb.size(); ++i)
    if (model.params().at(i).name.rfind("accent.", 0) == 0)
      EXPECT_EQ(gb.at(i).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Train, ZeroEpochsWritesInitialCheckpointOnly) {
  TinySetup s;
  s.cfg.train.epochs = 0;
  const std::string dir = testing::TempDir("train_zero");
  TrainResult r = Train(s.corpus, s.cfg, {dir, {}});
  EXPECT_TRUE(r.epochs.empty());
  EXPECT_TRUE(fs::exists(dir + "/model.ckpt"));
  EXPECT_EQ(Slurp(dir + "/metrics.jsonl"), "");
  auto restored = RestoreModel(LoadCheckpoint(dir + "/model.ckpt"));
  for (int i = 0; i < restored->params().size(); ++i)
    EXPECT_EQ(restored->params().at(i).value, r.model->params().at(i).value);
}

TEST(Train, SameSeedSameLogBytes) {
  TinySetup s;
  s.cfg.train.epochs = 2;
  ThreadsEnv env("1");
  const std::string a = testing::TempDir("train_det_a"), b = testing::TempDir("train_det_b");
  Train(s.corpus, s.cfg, {a, {}});
  Train(s.corpus, s.cfg, {b, {}});
  const std::string log = Slurp(a + "/metrics.jsonl");
  EXPECT_EQ(log, Slurp(b + "/metrics.jsonl"));
  EXPECT_EQ(Slurp(a + "/model.ckpt"), Slurp(b + "/model.ckpt"));
  // Two lines with the declared keys in order.
  std::istringstream lines(log);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    ++n;
    auto j = nlohmann::ordered_json::parse(line);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"epoch", "l_att", "l_ctc", "l_ar", "dev_wer",
                                              "dev_ar_acc", "ctc_infeasible", "all_blank"}));
    EXPECT_EQ(j["epoch"], n);
  }
  EXPECT_EQ(n, 2);
  Config other = s.cfg;
  other.train.seed = 99;
  const std::string c = testing::TempDir("train_det_c");
  Train(s.corpus, other, {c, {}});
  EXPECT_NE(Slurp(c + "/metrics.jsonl"), log);
}

TEST(Train, ThreadedRunsAreReproducible) {
  TinySetup s;
  ThreadsEnv env("3");
  TrainResult a = Train(s.corpus, s.cfg, {});
  TrainResult b = Train(s.corpus, s.cfg, {});
  EXPECT_EQ(EpochMetricsJson(a.epochs[0]), EpochMetricsJson(b.epochs[0]));
  for (int i = 0; i < a.model->params().size(); ++i)
    EXPECT_EQ(a.model->params().at(i).value, b.model->params().at(i).value);
}

TEST(Train, CheckpointRoundTripGivesIdenticalDevMetrics) {
  TinySetup s;
  const std::string dir = testing::TempDir("train_rt");
  TrainResult r = Train(s.corpus, s.cfg, {dir, {}});
  auto restored = RestoreModel(LoadCheckpoint(dir + "/model.ckpt"), &s.cfg);
  DecodeConfig dc = s.cfg.decode;
  EvalResult a = Evaluate(*r.model, s.corpus.dev, dc, s.corpus.lexicon, 1);
  EvalResult b = Evaluate(*restored, s.corpus.dev, dc, s.corpus.lexicon, 1);
  EXPECT_EQ(a.wer, b.wer);
  EXPECT_EQ(a.ar_acc, b.ar_acc);
  ASSERT_EQ(a.decodes.size(), b.decodes.size());
  for (size_t i = 0; i < a.decodes.size(); ++i) {
    EXPECT_EQ(a.decodes[i].Best().y_c, b.decodes[i].Best().y_c);
    EXPECT_EQ(a.decodes[i].Best().total, b.decodes[i].Best().total);
  }
}

TEST(Train, DivergenceAbortsAndKeepsLastGoodCheckpoint) {
  TinySetup s;
  s.cfg.train.epochs = 2;
  s.corpus.train[2].frames(0, 0) = std::numeric_limits<double>::quiet_NaN();
  const std::string dir = testing::TempDir("train_nan");
  try {
    Train(s.corpus, s.cfg, {dir, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerics);
  }
  EXPECT_NO_THROW(RestoreModel(LoadCheckpoint(dir + "/model.ckpt")));
}

TEST(Train, RejectsAllZeroWeights) {
  TinySetup s;
  s.cfg.train.w_att = s.cfg.train.w_ctc = s.cfg.train.w_ar = 0.0;
  EXPECT_THROW(Train(s.corpus, s.cfg, {}), Error);
}

TEST(Ablation, GridBookkeeping) {
  TinySetup s;
  auto axes = ParseGrid("model.fusion=AF_i,AF_ied");
  ASSERT_EQ(axes.size(), 1u);
  AblationResult r = RunAblation(s.corpus, s.cfg, axes, {1, 2, 3});
  ASSERT_EQ(r.runs.size(), 6u);
  ASSERT_EQ(r.rows.size(), 2u);
  for (const AblationRow& row : r.rows) {
    EXPECT_EQ(row.n_seeds, 3);
    double sum = 0;
    for (const AblationRun& run : r.runs)
      if (run.values == row.values) sum += run.test_wer;
    EXPECT_NEAR(row.test_wer, sum / 3, 1e-15);
  }
  EXPECT_EQ(r.rows[0].values, std::vector<std::string>{"AF_i"});
  const std::string dir = testing::TempDir("ablation_csv");
  WriteAblationCsv(dir + "/a.csv", r);
  std::ifstream in(dir + "/a.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "model.fusion,n_seeds,dev_ar_acc,dev_wer,test_ar_acc,test_wer");
}

TEST(Ablation, ParseGridValidatesKeys) {
  auto axes = ParseGrid("model.units=two_granularity,coarse_only; train.w_ar=0.4,0");
  ASSERT_EQ(axes.size(), 2u);
  EXPECT_EQ(axes[1].values, (std::vector<std::string>{"0.4", "0"}));
  EXPECT_THROW(ParseGrid("model.nope=1"), Error);
  EXPECT_THROW(ParseGrid("model.fusion"), Error);
  EXPECT_THROW(ParseGrid("model.fusion="), Error);
}

}  // namespace
}  // namespace dimnet

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

// dimnet_toy: command-line driver over the C API.
//
//   dimnet_toy gen-data --out data/ --seed 7
//   dimnet_toy train --data data/ --out exp/
//   dimnet_toy decode --ckpt exp/model.ckpt --data data/ --out dec/ --w2 0
//   dimnet_toy eval --ckpt exp/model.ckpt --data data/ --out eval/
//   dimnet_toy ablate --data data/ --grid "model.fusion=AF_i,AF_ied" --seeds 1,2,3 --out abl/
//   dimnet_toy grad-check

#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dimnet/dimnet.h"

namespace {

struct Failure {
  std::string what;
};

void Check(dimnet_status s) {
  if (s != DIMNET_OK) throw Failure{dimnet_last_error()};
}

class ConfigHandle {
 public:
  ConfigHandle() { Check(dimnet_config_new(&cfg_)); }
  ~ConfigHandle() { dimnet_config_free(cfg_); }
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
  dimnet_config* get() { return cfg_; }
  void Set(const std::string& key, const std::string& value) {
    Check(dimnet_config_set(cfg_, key.c_str(), value.c_str()));
  }

 private:
  dimnet_config* cfg_ = nullptr;
};

std::string Describe() {
  size_t need = 0;
  if (dimnet_config_describe(nullptr, 0, &need) != DIMNET_OK) return "";
  std::string s(need, '\0');
  if (dimnet_config_describe(s.data(), s.size(), nullptr) != DIMNET_OK) return "";
  s.resize(need - 1);
  return s;
}

template <typename T>
std::string Str(const T& v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DIMNet-Toy: joint accent and speech recognition on a synthetic corpus"};
  app.require_subcommand(1);
  app.footer("Config keys (use in --config files as `key = value` or via --set key=value):\n" +
             Describe() +
             "\nEnvironment:\n  DIMNET_TOY_THREADS  worker threads for batch gradients "
             "(default 1, deterministic for any value)\n");

  std::string config_file;
  std::vector<std::string> sets;
  app.add_option("--config", config_file, "flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override, key=value (repeatable)");

  std::optional<std::uint64_t> seed;
  std::string out, data, ckpt, split = "test", grid, seeds_arg = "1,2,3";
  std::optional<int> beam, epochs;
  std::optional<double> w1, w2, w3;
  int top_k = 0;

  auto* gen = app.add_subcommand("gen-data", "generate the synthetic corpus");
  gen->add_option("--out", out, "output corpus directory")->required();
  gen->add_option("--seed", seed, "corpus seed");

  auto* train = app.add_subcommand("train", "train a model");
  train->add_option("--data", data, "corpus directory")->required();
  train->add_option("--out", out, "run directory")->required();
  train->add_option("--seed", seed, "model and shuffling seed");
  train->add_option("--epochs", epochs, "training epochs");

  auto add_decode_flags = [&](CLI::App* sub) {
    sub->add_option("--ckpt", ckpt, "checkpoint file")->required();
    sub->add_option("--data", data, "corpus directory")->required();
    sub->add_option("--split", split, "train|dev|test")->capture_default_str();
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--beam", beam, "first-pass beam size");
    sub->add_option("--w1", w1, "attention score weight");
    sub->add_option("--w2", w2, "fine CTC score weight");
    sub->add_option("--w3", w3, "LM score weight");
  };
  auto* decode = app.add_subcommand("decode", "decode a split to n-best JSON lines");
  add_decode_flags(decode);
  auto* eval = app.add_subcommand("eval", "decode and write metric CSVs");
  add_decode_flags(eval);
  eval->add_option("--top-k", top_k, "phonemes listed per accent (0: planted-set size)");

  auto* ablate = app.add_subcommand("ablate", "train and compare a grid of configs");
  ablate->add_option("--data", data, "corpus directory")->required();
  ablate->add_option("--grid", grid, "axes, e.g. \"model.fusion=AF_i,AF_ied;train.w_ar=0.2,0.4\"")
      ->required();
  ablate->add_option("--seeds", seeds_arg, "comma-separated seeds")->capture_default_str();
  ablate->add_option("--out", out, "output directory")->required();
  ablate->add_option("--epochs", epochs, "training epochs per run");

  auto* gc = app.add_subcommand("grad-check", "finite-difference gradient suite");
  gc->add_option("--seed", seed, "suite seed");

  CLI11_PARSE(app, argc, argv);

  try {
    ConfigHandle cfg;
    if (!config_file.empty()) Check(dimnet_config_load(cfg.get(), config_file.c_str()));
    for (const std::string& kv : sets) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw Failure{"--set expects key=value, got '" + kv + "'"};
      cfg.Set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (epochs) cfg.Set("train.epochs", Str(*epochs));
    if (beam) cfg.Set("decode.beam", Str(*beam));
    if (w1) cfg.Set("decode.w1", Str(*w1));
    if (w2) cfg.Set("decode.w2", Str(*w2));
    if (w3) cfg.Set("decode.w3", Str(*w3));

    if (*gen) {
      if (seed) cfg.Set("corpus.seed", Str(*seed));
      Check(dimnet_gen_data(cfg.get(), out.c_str()));
      std::printf("corpus written to %s\n", out.c_str());
    } else if (*train) {
      if (seed) {
        cfg.Set("model.seed", Str(*seed));
        cfg.Set("train.seed", Str(*seed));
      }
      Check(dimnet_train(cfg.get(), data.c_str(), out.c_str()));
      std::printf("checkpoint: %s/model.ckpt\nmetrics: %s/metrics.jsonl\n", out.c_str(), out.c_str());
    } else if (*decode) {
      double wer = 0;
      Check(dimnet_decode(cfg.get(), ckpt.c_str(), data.c_str(), split.c_str(), out.c_str(), &wer));
      std::printf("%s WER %.4f -> %s/decode.jsonl\n", split.c_str(), wer, out.c_str());
    } else if (*eval) {
      double wer = 0, acc = 0;
      Check(dimnet_eval(cfg.get(), ckpt.c_str(), data.c_str(), split.c_str(), out.c_str(), top_k,
                        &wer, &acc));
      std::printf("%s WER %.4f AR_ACC %.4f -> %s/summary.csv\n", split.c_str(), wer, acc, out.c_str());
    } else if (*ablate) {
      std::vector<std::uint64_t> seeds;
      std::stringstream ss(seeds_arg);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          seeds.push_back(std::stoull(tok));
        } catch (const std::exception&) {
          throw Failure{"bad seed '" + tok + "'"};
        }
      }
      Check(dimnet_ablate(cfg.get(), data.c_str(), grid.c_str(), seeds.data(), seeds.size(),
                          out.c_str()));
      std::printf("ablation table: %s/ablation.csv\n", out.c_str());
    } else if (*gc) {
      double worst = 0;
      std::string report(1 << 16, '\0');
      Check(dimnet_grad_check(seed.value_or(1), &worst, report.data(), report.size(), nullptr));
      std::fputs(report.c_str(), stdout);
      std::printf("max relative error %.3e\n", worst);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "dimnet_toy: %s\n", f.what.c_str());
    return 1;
  }
  return 0;
}

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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "dimnet/checkpoint.h"
#include "dimnet/ctc.h"
#include "dimnet/error.h"

namespace dimnet {

double CombineLosses(double l_att, double l_ctc, double l_ar, const TrainConfig& t) {
  const std::pair<const char*, double> parts[] = {
      {"attention", l_att}, {"ctc", l_ctc}, {"accent", l_ar}};
  for (const auto& [name, v] : parts)
    if (!std::isfinite(v))
      Fail(ErrorCode::kNumerics, std::string("non-finite ") + name + " loss");
  return t.w_att * l_att + t.w_ctc * l_ctc + t.w_ar * l_ar;
}

std::vector<double> ClassWeights(const std::vector<Utterance>& train, int n_accents,
                                 ClassWeighting mode) {
  std::vector<double> w(n_accents, 1.0);
  if (mode == ClassWeighting::kNone) return w;
  std::vector<long> counts(n_accents, 0);
  for (const Utterance& u : train)
    if (u.accent >= 0 && u.accent < n_accents) ++counts[u.accent];
  const long largest = *std::max_element(counts.begin(), counts.end());
  for (int k = 0; k < n_accents; ++k)
    w[k] = counts[k] > 0 ? static_cast<double>(largest) / counts[k] : 1.0;
  return w;
}

int ThreadCount() {
  const char* env = std::getenv("DIMNET_TOY_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1)
    Fail(ErrorCode::kConfig, std::string("DIMNET_TOY_THREADS must be a positive integer, got '") +
                                 env + "'");
  return static_cast<int>(std::min<long>(v, 256));
}

void ParallelFor(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Adam::Adam(const ag::ParamStore& store, const TrainConfig& t) : cfg_(t) {
  for (int i = 0; i < store.size(); ++i) {
    const ag::Mat& v = store.at(i).value;
    m_.push_back(ag::Mat::Zero(v.rows(), v.cols()));
    v_.push_back(ag::Mat::Zero(v.rows(), v.cols()));
  }
}

double Adam::LearningRate(long step) const {
  const double s = static_cast<double>(std::max<long>(step, 1));
  if (cfg_.warmup_steps <= 0) return cfg_.lr;
  const double w = cfg_.warmup_steps;
  return cfg_.lr * std::min(s / w, std::sqrt(w / s));
}

void Adam::Step(ag::ParamStore* store, const ag::GradBuffer& grad) {
  ++step_;
  const double lr = LearningRate(step_);
  const double b1 = cfg_.adam_beta1, b2 = cfg_.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (int i = 0; i < store->size(); ++i) {
    const ag::Mat& g = grad.at(i);
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g.cwiseProduct(g);
    store->at(i).value.array() -=
        lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + cfg_.adam_eps);
  }
}

BatchStats BatchGradient(const DimNet& model, const std::vector<const Utterance*>& batch,
                         const std::vector<double>& class_weights, double scale,
                         int threads, ag::GradBuffer* grad) {
  const int n = static_cast<int>(batch.size());
  struct Slot {
    double att = 0, ctc = 0, ar = 0;
    bool ctc_ok = true, ar_on = true, all_blank = false;
    ag::GradBuffer g;
  };
  std::vector<Slot> slots(n);
  auto run = [&](int i, ag::GradBuffer* into) {
    ag::Graph g;
    LossTerms l = model.Losses(g, *batch[i], class_weights);
    Slot& s = slots[i];
    s.att = l.att.val()(0, 0);
    s.ctc = l.ctc.val()(0, 0);
    s.ar = l.ar.val()(0, 0);
    s.ctc_ok = l.ctc_feasible;
    s.ar_on = l.ar_active;
    try {
      // Infeasible CTC targets are masked, not divergence.
      CombineLosses(s.att, s.ctc_ok ? s.ctc : 0.0, s.ar, model.config().train);
    } catch (const Error& e) {
      Fail(ErrorCode::kNumerics, std::string(e.what()) + " on " + batch[i]->utt_id);
    }
    g.Backward(l.total);
    g.AccumulateParamGrads(into, scale);
  };
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) run(i, grad);
  } else {
    for (Slot& s : slots) s.g = ag::GradBuffer(model.params());
    ParallelFor(n, threads, [&](int i) { run(i, &slots[i].g); });
    for (Slot& s : slots) grad->Add(s.g);
  }
  BatchStats st;
  for (const Slot& s : slots) {
    ++st.n;
    st.att += s.att;
    if (s.ctc_ok) {
      st.ctc += s.ctc;
      ++st.n_ctc;
    } else {
      ++st.ctc_infeasible;
    }
    if (s.ar_on) {
      st.ar += s.ar;
      ++st.n_ar;
    }
  }
  return st;
}

EvalResult Evaluate(const DimNet& model, const std::vector<Utterance>& utts,
                    const DecodeConfig& dc, const Lexicon& lexicon, int threads) {
  const int n = static_cast<int>(utts.size());
  std::unique_ptr<LmScorer> lm = MakeLm(dc.lm, model.inventory().size(Side::kCoarse));
  EvalResult r;
  r.decodes.resize(n);
  ParallelFor(n, threads, [&](int i) {
    r.decodes[i] = DecodeUtterance(model, utts[i].frames, dc, lexicon, lm.get());
  });
  CorpusErrorRate wer, per;
  std::vector<int> preds, labels;
  for (int i = 0; i < n; ++i) {
    const UtteranceDecode& d = r.decodes[i];
    wer.Add(EditErrorRate(utts[i].y_c, d.nbest.empty() ? std::vector<int>{} : d.Best().y_c));
    per.Add(EditErrorRate(model.CtcTargets(utts[i].y_f, utts[i].y_c), d.ctc_greedy));
    preds.push_back(d.accent_pred);
    labels.push_back(utts[i].accent);
  }
  r.wer = wer.rate;
  r.fine_per = per.rate;
  r.accent = AccentAccuracy(preds, labels, model.n_accents());
  r.ar_acc = r.accent.accuracy;
  return r;
}

std::string EpochMetricsJson(const EpochMetrics& m) {
  nlohmann::ordered_json j;
  j["epoch"] = m.epoch;
  j["l_att"] = m.l_att;
  j["l_ctc"] = m.l_ctc;
  j["l_ar"] = m.l_ar;
  j["dev_wer"] = m.dev_wer;
  j["dev_ar_acc"] = m.dev_ar_acc;
  j["ctc_infeasible"] = m.ctc_infeasible;
  j["all_blank"] = m.all_blank;
  return j.dump();
}

TrainResult Train(const Corpus& data, const Config& cfg, const TrainOptions& opts) {
  ValidateConfig(cfg);
  const TrainConfig& t = cfg.train;
  if (t.w_att < 0 || t.w_ctc < 0 || t.w_ar < 0 || t.w_att + t.w_ctc + t.w_ar <= 0)
    Fail(ErrorCode::kConfig, "loss weights must be nonnegative with at least one positive");
  TrainResult res;
  res.model = std::make_unique<DimNet>(cfg, data.inventory);
  DimNet& model = *res.model;
  const int threads = ThreadCount();

  namespace fs = std::filesystem;
  const bool write = !opts.out_dir.empty();
  std::string ckpt_path, log_path;
  if (write) {
    fs::create_directories(opts.out_dir);
    std::ofstream(opts.out_dir + "/config.txt") << ConfigToText(cfg);
    ckpt_path = opts.out_dir + "/model.ckpt";
    log_path = opts.out_dir + "/metrics.jsonl";
    std::ofstream(log_path, std::ios::trunc);
    SaveModel(ckpt_path, model);
  }

  const std::vector<double> cw = ClassWeights(data.train, model.n_accents(), t.class_weights);
  Adam adam(model.params(), t);
  std::mt19937_64 rng(t.seed);
  std::vector<int> order(data.train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  DecodeConfig dev_dc = cfg.decode;
  dev_dc.beam = t.dev_beam;
  dev_dc.w2 = 0.0;
  dev_dc.w3 = 0.0;

  ag::GradBuffer grad(model.params());
  for (int epoch = 1; epoch <= t.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    BatchStats tot;
    for (size_t start = 0; start < order.size(); start += t.batch_size) {
      const size_t end = std::min(order.size(), start + t.batch_size);
      std::vector<const Utterance*> batch;
      for (size_t i = start; i < end; ++i) batch.push_back(&data.train[order[i]]);
      grad.Zero();
      BatchStats st = BatchGradient(model, batch, cw, 1.0 / batch.size(), threads, &grad);
      if (!grad.AllFinite()) Fail(ErrorCode::kNumerics, "non-finite gradient in epoch " +
                                                             std::to_string(epoch));
      if (t.grad_clip > 0) {
        const double norm = std::sqrt(grad.SquaredNorm());
        if (norm > t.grad_clip) grad.Scale(t.grad_clip / norm);
      }
      adam.Step(&model.params(), grad);
      tot.att += st.att;
      tot.ctc += st.ctc;
      tot.ar += st.ar;
      tot.n += st.n;
      tot.n_ctc += st.n_ctc;
      tot.n_ar += st.n_ar;
      tot.ctc_infeasible += st.ctc_infeasible;
    }
    EpochMetrics m;
    m.epoch = epoch;
    m.l_att = tot.n > 0 ? tot.att / tot.n : 0.0;
    m.l_ctc = tot.n_ctc > 0 ? tot.ctc / tot.n_ctc : 0.0;
    m.l_ar = tot.n_ar > 0 ? tot.ar / tot.n_ar : 0.0;
    m.ctc_infeasible = tot.ctc_infeasible;
    EvalResult dev = Evaluate(model, data.dev, dev_dc, data.lexicon, threads);
    m.dev_wer = dev.wer;
    m.dev_ar_acc = dev.ar_acc;
    {
      // Count dev utterances whose greedy CTC output was all blank.
      int ab = 0;
      for (const UtteranceDecode& d : dev.decodes) ab += d.ctc_greedy.empty();
      m.all_blank = ab;
    }
    res.epochs.push_back(m);
    if (write) {
      std::ofstream(log_path, std::ios::app) << EpochMetricsJson(m) << '\n';
      SaveModel(ckpt_path, model);
    }
    if (opts.on_epoch) opts.on_epoch(m);
  }
  return res;
}

std::vector<AblationAxis> ParseGrid(const std::string& spec) {
  std::vector<AblationAxis> axes;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.find_first_not_of(" \t") == std::string::npos) continue;
    auto eq = part.find('=');
    if (eq == std::string::npos)
      Fail(ErrorCode::kConfig, "grid axis '" + part + "' is not key=v1,v2");
    AblationAxis a;
    a.key = part.substr(0, eq);
    a.key.erase(0, a.key.find_first_not_of(" \t"));
    a.key.erase(a.key.find_last_not_of(" \t") + 1);
    std::stringstream vs(part.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, ',')) {
      v.erase(0, v.find_first_not_of(" \t"));
      v.erase(v.find_last_not_of(" \t") + 1);
      if (!v.empty()) a.values.push_back(v);
    }
    if (a.values.empty()) Fail(ErrorCode::kConfig, "grid axis '" + a.key + "' has no values");
    Config probe;
    SetConfigKey(&probe, a.key, a.values.front());
    axes.push_back(std::move(a));
  }
  return axes;
}

AblationResult RunAblation(const Corpus& data, const Config& base,
                           const std::vector<AblationAxis>& axes,
                           const std::vector<std::uint64_t>& seeds,
                           const std::function<void(const AblationRun&)>& on_run) {
  AblationResult r;
  r.axes = axes;
  std::vector<std::vector<std::string>> points = {{}};
  for (const AblationAxis& a : axes) {
    std::vector<std::vector<std::string>> next;
    for (const auto& p : points) {
      for (const std::string& v : a.values) {
        auto q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  const int threads = ThreadCount();
  for (const auto& p : points) {
    AblationRow row;
    row.values = p;
    for (std::uint64_t seed : seeds) {
      Config cfg = base;
      for (size_t i = 0; i < axes.size(); ++i) SetConfigKey(&cfg, axes[i].key, p[i]);
      cfg.model.seed = seed;
      cfg.train.seed = seed;
      TrainResult tr = Train(data, cfg, {});
      EvalResult dev = Evaluate(*tr.model, data.dev, cfg.decode, data.lexicon, threads);
      EvalResult test = Evaluate(*tr.model, data.test, cfg.decode, data.lexicon, threads);
      AblationRun run{p, seed, dev.wer, dev.ar_acc, test.wer, test.ar_acc};
      if (on_run) on_run(run);
      r.runs.push_back(run);
      ++row.n_seeds;
      row.dev_wer += run.dev_wer;
      row.dev_ar_acc += run.dev_ar_acc;
      row.test_wer += run.test_wer;
      row.test_ar_acc += run.test_ar_acc;
    }
    if (row.n_seeds > 0) {
      row.dev_wer /= row.n_seeds;
      row.dev_ar_acc /= row.n_seeds;
      row.test_wer /= row.n_seeds;
      row.test_ar_acc /= row.n_seeds;
    }
    r.rows.push_back(row);
  }
  return r;
}

namespace {

std::ofstream OpenCsv(const std::string& path) {
  std::ofstream os(path);
  if (!os) Fail(ErrorCode::kIo, "cannot write " + path);
  os.precision(6);
  return os;
}

}  // namespace

void WriteAblationCsv(const std::string& path, const AblationResult& r) {
  std::ofstream os = OpenCsv(path);
  for (const AblationAxis& a : r.axes) os << a.key << ',';
  os << "n_seeds,dev_ar_acc,dev_wer,test_ar_acc,test_wer\n";
  for (const AblationRow& row : r.rows) {
    for (const std::string& v : row.values) os << v << ',';
    os << row.n_seeds << ',' << row.dev_ar_acc << ',' << row.dev_wer << ','
       << row.test_ar_acc << ',' << row.test_wer << '\n';
  }
}

void WriteAblationRunsCsv(const std::string& path, const AblationResult& r) {
  std::ofstream os = OpenCsv(path);
  for (const AblationAxis& a : r.axes) os << a.key << ',';
  os << "seed,dev_ar_acc,dev_wer,test_ar_acc,test_wer\n";
  for (const AblationRun& run : r.runs) {
    for (const std::string& v : run.values) os << v << ',';
    os << run.seed << ',' << run.dev_ar_acc << ',' << run.dev_wer << ','
       << run.test_ar_acc << ',' << run.test_wer << '\n';
  }
}

}  // namespace dimnet

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

#include "dimnet/dimnet.h"

#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include "dimnet/decoding.h"
#include "dimnet/error.h"
#include "dimnet/grad_check.h"
#include "dimnet/pipeline.h"

struct dimnet_config {
  dimnet::RunConfig rc;
};

struct dimnet_model {
  std::unique_ptr<dimnet::DimNet> net;
  dimnet::Lexicon lexicon;  // empty: coarse-only rescoring needs none
};

namespace {

thread_local std::string g_last_error;

dimnet_status ToStatus(dimnet::ErrorCode c) {
  return static_cast<dimnet_status>(static_cast<int>(c));
}

template <typename F>
dimnet_status Guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return DIMNET_OK;
  } catch (const dimnet::Error& e) {
    g_last_error = e.what();
    return ToStatus(e.code());
  } catch (const std::exception& e) {
    g_last_error = std::string("internal: ") + e.what();
    return DIMNET_E_INTERNAL;
  } catch (...) {
    g_last_error = "internal: unknown exception";
    return DIMNET_E_INTERNAL;
  }
}

void Need(const void* p, const char* what) {
  if (p == nullptr)
    dimnet::Fail(dimnet::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

void CopyOut(const std::string& s, char* buf, size_t len, size_t* needed) {
  if (needed != nullptr) *needed = s.size() + 1;
  if (buf == nullptr) return;
  if (len < s.size() + 1)
    dimnet::Fail(dimnet::ErrorCode::kInvalidArgument,
                 "buffer too small: need " + std::to_string(s.size() + 1));
  std::memcpy(buf, s.c_str(), s.size() + 1);
}

}  // namespace

extern "C" {

const char* dimnet_last_error(void) { return g_last_error.c_str(); }

const char* dimnet_status_name(dimnet_status s) {
  switch (s) {
    case DIMNET_OK: return "OK";
    case DIMNET_E_INTERNAL: return "Internal";
    default: return dimnet::ErrorCodeName(static_cast<dimnet::ErrorCode>(s));
  }
}

const char* dimnet_version(void) { return "0.1.0"; }

dimnet_status dimnet_config_new(dimnet_config** out) {
  return Guard([&] {
    Need(out, "out");
    *out = new dimnet_config();
  });
}

void dimnet_config_free(dimnet_config* cfg) { delete cfg; }

dimnet_status dimnet_config_load(dimnet_config* cfg, const char* path) {
  return Guard([&] {
    Need(cfg, "cfg");
    Need(path, "path");
    cfg->rc.Load(path);
  });
}

dimnet_status dimnet_config_set(dimnet_config* cfg, const char* key, const char* value) {
  return Guard([&] {
    Need(cfg, "cfg");
    Need(key, "key");
    Need(value, "value");
    cfg->rc.Set(key, value);
  });
}

dimnet_status dimnet_config_get(const dimnet_config* cfg, const char* key, char* buf,
                                size_t len, size_t* needed) {
  return Guard([&] {
    Need(cfg, "cfg");
    Need(key, "key");
    CopyOut(dimnet::GetConfigKey(cfg->rc.cfg, key), buf, len, needed);
  });
}

dimnet_status dimnet_config_to_text(const dimnet_config* cfg, char* buf, size_t len,
                                    size_t* needed) {
  return Guard([&] {
    Need(cfg, "cfg");
    CopyOut(dimnet::ConfigToText(cfg->rc.cfg), buf, len, needed);
  });
}

dimnet_status dimnet_config_describe(char* buf, size_t len, size_t* needed) {
  return Guard([&] { CopyOut(dimnet::DescribeConfigKeys(), buf, len, needed); });
}

dimnet_status dimnet_config_validate(const dimnet_config* cfg) {
  return Guard([&] {
    Need(cfg, "cfg");
    dimnet::ValidateConfig(cfg->rc.cfg);
  });
}

dimnet_status dimnet_gen_data(const dimnet_config* cfg, const char* out_dir) {
  return Guard([&] {
    Need(cfg, "cfg");
    Need(out_dir, "out_dir");
    dimnet::GenData(cfg->rc, out_dir);
  });
}

dimnet_status dimnet_train(const dimnet_config* cfg, const char* corpus_dir,
                           const char* out_dir) {
  return Guard([&] {
    Need(cfg, "cfg");
    Need(corpus_dir, "corpus_dir");
    Need(out_dir, "out_dir");
    dimnet::TrainFromDir(cfg->rc, corpus_dir, out_dir);
  });
}

dimnet_status dimnet_decode(const dimnet_config* cfg, const char* checkpoint,
                            const char* corpus_dir, const char* split, const char* out_dir,
                            double* wer) {
  return Guard([&] {
    Need(cfg, "cfg");
    Need(checkpoint, "checkpoint");
    Need(corpus_dir, "corpus_dir");
    Need(split, "split");
    Need(out_dir, "out_dir");
    dimnet::EvalResult r = dimnet::DecodeSplit(cfg->rc, checkpoint, corpus_dir, split, out_dir);
    if (wer != nullptr) *wer = r.wer;
  });
}

dimnet_status dimnet_eval(const dimnet_config* cfg, const char* checkpoint,
                          const char* corpus_dir, const char* split, const char* out_dir,
                          int top_k, double* wer, double* ar_acc) {
  return Guard([&] {
    Need(cfg, "cfg");
    Need(checkpoint, "checkpoint");
    Need(corpus_dir, "corpus_dir");
    Need(split, "split");
    Need(out_dir, "out_dir");
    dimnet::EvalSummary s =
        dimnet::EvalSplit(cfg->rc, checkpoint, corpus_dir, split, out_dir, top_k);
    if (wer != nullptr) *wer = s.result.wer;
    if (ar_acc != nullptr) *ar_acc = s.result.ar_acc;
  });
}

dimnet_status dimnet_ablate(const dimnet_config* cfg, const char* corpus_dir,
                            const char* grid, const uint64_t* seeds, size_t n_seeds,
                            const char* out_dir) {
  return Guard([&] {
    Need(cfg, "cfg");
    Need(corpus_dir, "corpus_dir");
    Need(grid, "grid");
    Need(out_dir, "out_dir");
    if (n_seeds == 0 || seeds == nullptr)
      dimnet::Fail(dimnet::ErrorCode::kInvalidArgument, "ablate needs at least one seed");
    std::vector<std::uint64_t> s(seeds, seeds + n_seeds);
    dimnet::AblateFromDir(cfg->rc, corpus_dir, grid, s, out_dir);
  });
}

dimnet_status dimnet_grad_check(uint64_t seed, double* max_rel_err, char* report,
                                size_t len, size_t* needed) {
  return Guard([&] {
    double worst = 0.0;
    std::ostringstream os;
    os.precision(3);
    for (const dimnet::GradSuiteEntry& e : dimnet::RunGradSuite(seed)) {
      worst = std::max(worst, e.report.max_rel_err);
      os << e.name << ' ' << std::scientific << e.report.max_rel_err << ' ' << e.report.worst
         << " coords=" << e.report.checked << '\n';
    }
    if (max_rel_err != nullptr) *max_rel_err = worst;
    if (report != nullptr || needed != nullptr) CopyOut(os.str(), report, len, needed);
  });
}

dimnet_status dimnet_model_load(const char* checkpoint, const dimnet_config* cfg,
                                dimnet_model** out) {
  return Guard([&] {
    Need(checkpoint, "checkpoint");
    Need(out, "out");
    dimnet::RunConfig rc;
    if (cfg != nullptr) rc = cfg->rc;
    auto m = std::make_unique<dimnet_model>();
    m->net = dimnet::LoadModel(checkpoint, rc);
    *out = m.release();
  });
}

void dimnet_model_free(dimnet_model* model) { delete model; }

dimnet_status dimnet_model_num_params(const dimnet_model* model, int64_t* n) {
  return Guard([&] {
    Need(model, "model");
    Need(n, "n");
    *n = model->net->params().NumScalars();
  });
}

dimnet_status dimnet_model_decode(const dimnet_model* model, const float* frames,
                                  int32_t num_frames, int32_t feat_dim, int32_t* best,
                                  size_t best_cap, size_t* best_len, int32_t* accent) {
  return Guard([&] {
    Need(model, "model");
    Need(frames, "frames");
    if (num_frames <= 0 || feat_dim <= 0)
      dimnet::Fail(dimnet::ErrorCode::kShape, "frames must be non-empty");
    Eigen::MatrixXd x(num_frames, feat_dim);
    for (int t = 0; t < num_frames; ++t)
      for (int f = 0; f < feat_dim; ++f) x(t, f) = frames[t * feat_dim + f];
    dimnet::DecodeConfig dc = model->net->config().decode;
    // Without a lexicon on hand the second pass has nothing to expand.
    dc.w2 = 0.0;
    auto lm = dimnet::MakeLm(dc.lm, model->net->inventory().size(dimnet::Side::kCoarse));
    dimnet::UtteranceDecode d =
        dimnet::DecodeUtterance(*model->net, x, dc, model->lexicon, lm.get());
    const std::vector<int>& y = d.Best().y_c;
    if (best_len != nullptr) *best_len = y.size();
    if (best != nullptr) {
      if (best_cap < y.size())
        dimnet::Fail(dimnet::ErrorCode::kInvalidArgument, "best buffer too small");
      for (size_t i = 0; i < y.size(); ++i) best[i] = y[i];
    }
    if (accent != nullptr) *accent = d.accent_pred;
  });
}

}  // extern "C"

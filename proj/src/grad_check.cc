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

#include "dimnet/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dimnet/accent_branch.h"
#include "dimnet/attention_branch.h"
#include "dimnet/ctc.h"
#include "dimnet/error.h"
#include "dimnet/layers.h"
#include "dimnet/model.h"
#include "dimnet/synthgen.h"

namespace dimnet {

double RelativeError(double analytic, double numeric) {
  return std::abs(analytic - numeric) / (std::abs(analytic) + std::abs(numeric) + 1e-12);
}

namespace {

void CheckFinite(double v, const std::string& what) {
  if (!std::isfinite(v)) Fail(ErrorCode::kNumerics, "non-finite " + what + " in grad_check");
}

}  // namespace

double GradCheck(const ScalarFn& f, const Eigen::VectorXd& x, double eps) {
  if (!(eps > 0)) Fail(ErrorCode::kInvalidArgument, "grad_check eps must be > 0");
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
  CheckFinite(f(x, &grad), "value");
  double worst = 0.0;
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    CheckFinite(grad(i), "analytic gradient");
    xp(i) = x(i) + eps;
    const double fp = f(xp, nullptr);
    xp(i) = x(i) - eps;
    const double fm = f(xp, nullptr);
    xp(i) = x(i);
    CheckFinite(fp, "value");
    CheckFinite(fm, "value");
    worst = std::max(worst, RelativeError(grad(i), (fp - fm) / (2 * eps)));
  }
  return worst;
}

GradCheckReport GradCheckParams(ag::ParamStore* store,
                                const std::function<ag::Var(ag::Graph&)>& loss,
                                const GradCheckOptions& opts) {
  ag::GradBuffer analytic(*store);
  {
    ag::Graph g;
    ag::Var l = loss(g);
    CheckFinite(l.val()(0, 0), "loss");
    g.Backward(l);
    g.AccumulateParamGrads(&analytic);
  }
  auto eval = [&]() {
    ag::Graph g(false);
    const double v = loss(g).val()(0, 0);
    CheckFinite(v, "loss");
    return v;
  };
  GradCheckReport rep;
  std::mt19937_64 rng(opts.seed);
  for (int p = 0; p < store->size(); ++p) {
    ag::Parameter& param = store->at(p);
    const long n = static_cast<long>(param.value.size());
    std::vector<long> coords(n);
    std::iota(coords.begin(), coords.end(), 0L);
    if (opts.max_coords_per_tensor > 0 && n > opts.max_coords_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(opts.max_coords_per_tensor);
    }
    for (long k : coords) {
      double& v = param.value.data()[k];
      const double a = analytic.at(p).data()[k];
      CheckFinite(a, "analytic gradient");
      const double saved = v;
      v = saved + opts.eps;
      const double fp = eval();
      v = saved - opts.eps;
      const double fm = eval();
      v = saved;
      const double err = RelativeError(a, (fp - fm) / (2 * opts.eps));
      ++rep.checked;
      if (err > rep.max_rel_err || rep.worst.empty()) {
        if (err >= rep.max_rel_err) {
          rep.max_rel_err = err;
          const long rows = static_cast<long>(param.value.rows());
          rep.worst = param.name + "[" + std::to_string(k % rows) + "," +
                      std::to_string(k / rows) + "]";
        }
      }
    }
  }
  return rep;
}

namespace {

ag::Mat RandomMat(int r, int c, std::mt19937_64* rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  ag::Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(*rng);
  return m;
}

// Moves every parameter off its structured init (zeros, ones).
void Jitter(ag::ParamStore* store, std::mt19937_64* rng, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  for (int i = 0; i < store->size(); ++i) {
    ag::Mat& v = store->at(i).value;
    for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] += nd(*rng);
  }
}

Config TinyConfig(std::uint64_t seed) {
  Config c;
  c.corpus.n_accents = 3;
  c.corpus.n_fine = 6;
  c.corpus.n_coarse = 9;
  c.corpus.feat_dim = 4;
  c.corpus.utt_len_min = 2;
  c.corpus.utt_len_max = 3;
  c.corpus.frames_per_unit_min = 3;
  c.corpus.frames_per_unit_max = 4;
  c.corpus.accent_prior = {};
  c.corpus.n_train = 4;
  c.corpus.n_dev = 1;
  c.corpus.n_test = 1;
  c.corpus.seed = seed;
  c.model.d_model = 8;
  c.model.ffn_dim = 12;
  c.model.heads = 2;
  c.model.conv_kernel = 3;
  c.model.shared_layers = 3;
  c.model.ctc_layers = 1;
  c.model.att_layers = 1;
  c.model.dec_layers = 1;
  c.model.lasas_spaces = 2;
  c.model.lasas_width = 6;
  c.model.lasas_dk = 3;
  c.model.classifier_blocks = 1;
  c.model.emb_dim = 5;
  c.model.detach = false;
  c.model.detach_taps = false;
  c.model.seed = seed;
  return c;
}

}  // namespace

std::vector<GradSuiteEntry> RunGradSuite(std::uint64_t seed, const GradCheckOptions& opts) {
  std::vector<GradSuiteEntry> out;
  std::mt19937_64 rng(seed);
  const nn::BlockDims dims{8, 12, 2, 3};
  const int T = 7;

  for (nn::BlockKind kind : {nn::BlockKind::kFeedForward, nn::BlockKind::kSelfAttention,
                             nn::BlockKind::kConformer}) {
    ag::ParamStore store;
    nn::Rng r(seed);
    auto block = nn::MakeEncoderBlock(kind, &store, "block", dims, &r);
    ag::Parameter* x = store.Add("input", T, dims.d_model);
    x->value = RandomMat(T, dims.d_model, &rng);
    Jitter(&store, &rng, 0.1);
    const ag::Mat proj = RandomMat(T, dims.d_model, &rng);
    auto loss = [&](ag::Graph& g) {
      return ag::Sum(ag::Mul(block->Forward(g, g.Param(*x)), g.Constant(proj)));
    };
    out.push_back({std::string("block.") + nn::BlockKindName(kind),
                   GradCheckParams(&store, loss, opts)});
  }

  {
    ag::ParamStore store;
    nn::Rng r(seed);
    const int mem_dim = 11;
    nn::DecoderLayer layer(&store, "dec", dims, mem_dim, &r);
    ag::Parameter* x = store.Add("input", 4, dims.d_model);
    ag::Parameter* mem = store.Add("memory", T, mem_dim);
    x->value = RandomMat(4, dims.d_model, &rng);
    mem->value = RandomMat(T, mem_dim, &rng);
    Jitter(&store, &rng, 0.1);
    const ag::Mat proj = RandomMat(4, dims.d_model, &rng);
    auto loss = [&](ag::Graph& g) {
      return ag::Sum(ag::Mul(layer.Forward(g, g.Param(*x), g.Param(*mem)), g.Constant(proj)));
    };
    out.push_back({"block.decoder", GradCheckParams(&store, loss, opts)});
  }

  {
    Config c = TinyConfig(seed);
    ag::ParamStore store;
    nn::Rng r(seed);
    const int acoustic = 12, text = 5, accents = 3;
    AccentBranch branch(&store, c.model, acoustic, text, accents, &r);
    ag::Parameter* xa = store.Add("x_a", T, acoustic);
    xa->value = RandomMat(T, acoustic, &rng);
    Jitter(&store, &rng, 0.1);
    ag::Mat xt = ag::Mat::Zero(T, text);
    for (int t = 0; t < T; ++t) xt(t, (t * 3 + 1) % text) = 1.0;
    const ag::Mat proj = RandomMat(1, c.model.emb_dim, &rng);
    const std::vector<double> cw = {1.0, 1.5, 2.0};
    for (EmbeddingKind kind : {EmbeddingKind::kDnn, EmbeddingKind::kPp, EmbeddingKind::kSim}) {
      auto loss = [&](ag::Graph& g) {
        AccentInputs in{g.Param(*xa), g.Constant(xt)};
        AccentOutput o = branch.Forward(g, in, AccentLevel::kFrame);
        ag::Var emb = branch.MakeEmbedding(g, o, kind, false);
        ag::Var e = ag::MatMulNT(ag::MeanRows(emb), g.Constant(proj));
        return ag::Add(AccentLoss(o, 1, cw), e);
      };
      out.push_back({std::string("lasas.") + EmbeddingKindName(kind),
                     GradCheckParams(&store, loss, opts)});
    }
    auto utt_loss = [&](ag::Graph& g) {
      AccentInputs in{g.Param(*xa), g.Constant(xt)};
      return AccentLoss(branch.Forward(g, in, AccentLevel::kUtterance), 2, cw);
    };
    out.push_back({"lasas.utterance", GradCheckParams(&store, utt_loss, opts)});
  }

  {
    ag::ParamStore store;
    ag::Parameter* logits = store.Add("logits", 5, 7);
    logits->value = RandomMat(5, 7, &rng, 2.0);
    const std::vector<int> targets = {3, 0, 6, 6, 1};
    auto loss = [&](ag::Graph& g) {
      return AttentionLoss(ag::LogSoftmax(g.Param(*logits)), targets, 0.1);
    };
    out.push_back({"loss.attention_ce", GradCheckParams(&store, loss, opts)});
  }

  {
    ag::ParamStore store;
    ag::Parameter* logits = store.Add("logits", T, 4);
    logits->value = RandomMat(T, 4, &rng, 2.0);
    const std::vector<double> cw = {1.0, 2.0, 1.0, 4.0};
    auto loss = [&](ag::Graph& g) {
      AccentOutput o;
      o.log_posteriors = ag::LogSoftmax(g.Param(*logits));
      o.level = AccentLevel::kFrame;
      return AccentLoss(o, 3, cw);
    };
    out.push_back({"loss.accent_ce", GradCheckParams(&store, loss, opts)});
  }

  {
    ag::ParamStore store;
    ag::Parameter* logits = store.Add("logits", 9, 5);
    logits->value = RandomMat(9, 5, &rng, 2.0);
    const std::vector<int> labels = {1, 3, 3, 2};
    auto loss = [&](ag::Graph& g) {
      return ctc::LossVar(ag::LogSoftmax(g.Param(*logits)), labels, 0);
    };
    out.push_back({"loss.ctc", GradCheckParams(&store, loss, opts)});
  }

  {
    Config c = TinyConfig(seed);
    Corpus data = GenerateCorpus(c.corpus);
    DimNet model(c, data.inventory);
    Jitter(&model.params(), &rng, 0.05);
    const std::vector<double> cw = {1.0, 1.2, 1.4};
    auto loss = [&](ag::Graph& g) {
      LossTerms a = model.Losses(g, data.train[0], cw);
      LossTerms b = model.Losses(g, data.train[1], cw);
      return ag::Scale(ag::Add(a.total, b.total), 0.5);
    };
    out.push_back({"loss.full", GradCheckParams(&model.params(), loss, opts)});
  }
  return out;
}

}  // namespace dimnet

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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.
//
//   acceptance [--report FILE] [criterion ...]

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimnet/config.h"
#include "dimnet/ctc.h"
#include "dimnet/decoding.h"
#include "dimnet/error.h"
#include "dimnet/grad_check.h"
#include "dimnet/metrics.h"
#include "dimnet/model.h"
#include "dimnet/pipeline.h"
#include "dimnet/synthgen.h"
#include "dimnet/training.h"
#include "oracles.h"
#include "test_util.h"

namespace dimnet {
namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string Fmt(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* fmt, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, ap);
  va_end(ap);
  return buf;
}

class Report {
 public:
  explicit Report(std::string path) : path_(std::move(path)) {}

  void Note(const std::string& s) { Emit("    " + s); }
  void Verdict(int n, bool pass, const std::string& what, double secs) {
    Emit(Fmt("criterion %d %s  %s  (%.1f s)", n, pass ? "PASS" : "FAIL", what.c_str(), secs));
    failed_ = failed_ || !pass;
  }
  bool failed() const { return failed_; }

 private:
  void Emit(const std::string& s) {
    std::printf("%s\n", s.c_str());
    std::fflush(stdout);
    if (!path_.empty()) std::ofstream(path_, std::ios::app) << s << '\n';
  }
  std::string path_;
  bool failed_ = false;
};

// 1. CTC forward/score against brute-force path enumeration.
void CtcOracle(Report* rep) {
  const auto t0 = Clock::now();
  const int V = 4, blank = 0;
  std::vector<std::vector<int>> labels = {{}};
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].size() == 3) continue;
    for (int v = 1; v < V; ++v) {
      auto l = labels[i];
      l.push_back(v);
      labels.push_back(l);
    }
  }
  std::mt19937_64 rng(1);
  double worst = 0.0;
  long cases = 0, infeasible = 0;
  bool ok = true;
  for (int T = 1; T <= 6; ++T) {
    for (int draw = 0; draw < 4; ++draw) {
      Eigen::MatrixXd lp = testing::RandomLogSoftmax(T, V, &rng, draw == 3 ? 4.0 : 1.0);
      for (const auto& y : labels) {
        const double want = oracle::CtcPathSum(lp, y, blank);
        const double score = ctc::Score(lp, y, blank);
        const ctc::LossResult loss = ctc::Loss(lp, y, blank);
        const double got = std::exp(score);
        worst = std::max(worst, std::abs(got - want));
        worst = std::max(worst, std::abs(std::exp(-loss.loss) - want));
        if (want == 0.0) {
          ++infeasible;
          ok = ok && score == kNegInf && !loss.feasible;
        }
        ++cases;
      }
    }
  }
  ok = ok && worst <= 1e-9;
  rep->Verdict(1, ok,
               Fmt("ctc score/loss vs path enumeration: %ld cases (%ld infeasible), "
                   "max |dP| %.2e",
                   cases, infeasible, worst),
               Since(t0));
}

// 2. Finite-difference suite.
void GradientSuite(Report* rep) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string worst_name;
  for (const GradSuiteEntry& e : RunGradSuite(1)) {
    rep->Note(Fmt("%-24s %.3e  (%ld coords)", e.name.c_str(), e.report.max_rel_err,
                  e.report.checked));
    if (e.report.max_rel_err >= worst) {
      worst = e.report.max_rel_err;
      worst_name = e.name + " " + e.report.worst;
    }
  }
  rep->Verdict(2, worst <= 1e-4,
               Fmt("gradient suite max relative error %.3e at %s", worst, worst_name.c_str()),
               Since(t0));
}

// 3. Stop-gradient boundaries on the default-size model.
void DetachLaws(Report* rep) {
  const auto t0 = Clock::now();
  Config base;
  base.corpus.n_train = 8;
  base.corpus.n_dev = 2;
  base.corpus.n_test = 2;
  Corpus c = GenerateCorpus(base.corpus);
  long zero_checked = 0;
  int violations = 0, dead = 0;
  auto is_accent = [](const std::string& n) { return n.rfind("accent.", 0) == 0; };
  for (FusionScheme s :
       {FusionScheme::kAfI, FusionScheme::kAfIe, FusionScheme::kAfId, FusionScheme::kAfIed}) {
    for (EmbeddingKind k : {EmbeddingKind::kDnn, EmbeddingKind::kPp, EmbeddingKind::kSim}) {
      Config cfg = base;
      cfg.model.fusion = s;
      cfg.model.emb_kind = k;
      DimNet model(cfg, c.inventory);
      std::mt19937_64 rng(static_cast<int>(s) * 7 + static_cast<int>(k));
      testing::Jitter(&model.params(), &rng, 0.02);
      for (int u = 0; u < 2; ++u) {
        ag::Graph g;
        LossTerms l = model.Losses(g, c.train[u], {});
        ag::GradBuffer ar = testing::GradientsOf(model.params(), g, l.ar);
        ag::Graph g2;
        LossTerms l2 = model.Losses(g2, c.train[u], {});
        ag::GradBuffer asr =
            testing::GradientsOf(model.params(), g2, ag::WeightedSum({l2.att, l2.ctc}, {1, 1}));
        double accent_mass = 0.0;
        for (int i = 0; i < model.params().size(); ++i) {
          const std::string& name = model.params().at(i).name;
          if (is_accent(name)) {
            accent_mass += ar.at(i).cwiseAbs().sum();
            if (asr.at(i).cwiseAbs().maxCoeff() != 0.0) {
              ++violations;
              rep->Note("asr loss reached " + name + " under " + FusionSchemeName(s));
            }
          } else if (ar.at(i).cwiseAbs().maxCoeff() != 0.0) {
            ++violations;
            rep->Note("accent loss reached " + name);
          }
          ++zero_checked;
        }
        if (accent_mass == 0.0) ++dead;
      }
    }
  }
  rep->Verdict(3, violations == 0 && dead == 0,
               Fmt("%ld parameter gradients checked across 4 fusion x 3 embedding variants, "
                   "%d non-zero where zero was required, %d dead accent losses",
                   zero_checked, violations, dead),
               Since(t0));
}

// 4. Regularisation of greedy CTC frames.
void RegularRule(Report* rep) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> len(1, 16), tok(1, 6), mode(0, 9);
  std::bernoulli_distribution blank(0.5);
  const int kBlank = 0, kSilence = 7;
  int mismatches = 0, trailing = 0, all_blank = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<int> f(len(rng));
    for (int& v : f) v = blank(rng) ? kBlank : tok(rng);
    const int m = mode(rng);
    if (m == 0) std::fill(f.begin(), f.end(), kBlank);
    if (m == 1) f.back() = kBlank;
    if (std::find(f.begin(), f.end(), kBlank) == f.end()) f[f.size() / 2] = kBlank;
    const auto want = oracle::RegularRule(f, kBlank);
    int count = 0;
    const std::vector<int> got = ctc::RegularizeOrSilence(f, kBlank, kSilence, &count);
    if (!want) {
      ++all_blank;
      bool threw = false;
      try {
        ctc::Regularize(f, kBlank);
      } catch (const Error&) {
        threw = true;
      }
      if (!threw || count != 1 || got != std::vector<int>(f.size(), kSilence)) ++mismatches;
      continue;
    }
    if (f.back() == kBlank) ++trailing;
    if (got != *want || ctc::Regularize(f, kBlank) != *want || count != 0) ++mismatches;
  }
  rep->Verdict(4, mismatches == 0 && trailing > 0 && all_blank > 0,
               Fmt("10000 blank-bearing sequences (%d trailing-blank, %d all-blank), "
                   "%d mismatches",
                   trailing, all_blank, mismatches),
               Since(t0));
}

// Shared corpora and trained models for 5-7.

struct Trained {
  std::string variant;
  std::uint64_t seed = 0;
  std::unique_ptr<DimNet> model;
  EvalResult test;
};

Trained TrainOne(const Corpus& c, const Config& cfg, const std::string& variant,
                 std::uint64_t seed, Report* rep) {
  const auto t0 = Clock::now();
  Config run = cfg;
  run.model.seed = seed;
  run.train.seed = seed;
  Trained t;
  t.variant = variant;
  t.seed = seed;
  t.model = Train(c, run, {}).model;
  t.test = Evaluate(*t.model, c.test, run.decode, c.lexicon, ThreadCount());
  rep->Note(Fmt("trained %-11s seed %llu: test WER %.4f  AR %.4f  (%.0f s)", variant.c_str(),
                static_cast<unsigned long long>(seed), t.test.wer, t.test.ar_acc, Since(t0)));
  return t;
}

// First-pass n-best plus CTC posteriors for one utterance.
struct Pass {
  std::vector<Hypothesis> first;
  Eigen::MatrixXd ctc_lp;
};

Pass FirstPass(const DimNet& model, const Utterance& u) {
  Pass p;
  ag::Graph g(false);
  EncodeResult enc = model.Encode(g, u.frames);
  p.ctc_lp = enc.ctc_log_probs.val();
  DecoderStepScorer scorer(model, enc.memory.val());
  BeamOptions bo;
  bo.beam = model.config().decode.beam;
  bo.bos = model.inventory().bos_id();
  bo.eos = model.inventory().eos_id();
  bo.max_len = MaxDecodeLength(static_cast<int>(enc.memory.rows()));
  bo.length_penalty = model.config().decode.length_penalty;
  p.first = BeamSearch(&scorer, bo);
  return p;
}

// Independent argmax over the n-best: scores rebuilt from the lexicon, the
// scaled forward recursion and the uniform LM formula.
int OracleRescore(const std::vector<Hypothesis>& hyps, const Eigen::MatrixXd& lp, int blank,
                  const Lexicon& lex, int coarse_vocab, const RescoreWeights& w) {
  int best = -1;
  double best_total = kNegInf;
  for (size_t i = 0; i < hyps.size(); ++i) {
    std::vector<int> fine;
    bool miss = false;
    for (int c : hyps[i].y_c) {
      const auto* e = lex.Entry(c);
      if (e == nullptr) {
        miss = true;
        break;
      }
      fine.insert(fine.end(), e->begin(), e->end());
    }
    const double ctc = miss ? kNegInf : oracle::CtcForwardScaled(lp, fine, blank);
    const double lm = -(hyps[i].y_c.size() + 1.0) * std::log(static_cast<double>(coarse_vocab));
    double total = w.w1 * hyps[i].att_logp;
    if (w.w2 > 0) total += w.w2 * ctc;
    if (w.w3 > 0) total += w.w3 * lm;
    if (!std::isfinite(total)) continue;
    if (best < 0 || total > best_total + 1e-9) {
      best = static_cast<int>(i);
      best_total = total;
    }
  }
  if (best >= 0) return best;
  best = 0;
  for (size_t i = 1; i < hyps.size(); ++i)
    if (hyps[i].att_logp > hyps[best].att_logp) best = static_cast<int>(i);
  return best;
}

std::vector<RescoreWeights> Grid() {
  std::vector<RescoreWeights> grid;
  for (double w3 : {0.0, 0.1, 0.3})
    for (int k = 1; k <= 10; ++k) grid.push_back({1.0, 0.1 * k, w3});
  return grid;
}

// 5. Rescoring reductions on the dev set of a trained default model. Also
// returns, per grid point, the dev WER of the rescored output.
std::vector<double> RescoreReductions(const Trained& t, const Corpus& c, Report* rep,
                                      bool verdict) {
  const auto t0 = Clock::now();
  const DimNet& model = *t.model;
  const int blank = model.ctc_blank();
  const int coarse_vocab = model.inventory().size(Side::kCoarse);
  UniformLm lm(coarse_vocab);
  DecodeConfig single = model.config().decode;
  single.w2 = 0.0;
  single.w3 = 0.0;
  const auto grid = Grid();
  std::vector<CorpusErrorRate> grid_wer(grid.size());
  CorpusErrorRate first_wer;
  int reduction_fail = 0, oracle_fail = 0, checks = 0, moved = 0;
  for (const Utterance& u : c.dev) {
    const Pass p = FirstPass(model, u);
    const UtteranceDecode d = DecodeUtterance(model, u.frames, single, c.lexicon, &lm);
    bool same = d.best == 0 && d.nbest.size() == p.first.size();
    for (size_t i = 0; same && i < p.first.size(); ++i)
      same = d.nbest[i].y_c == p.first[i].y_c && d.nbest[i].att_logp == p.first[i].att_logp;
    if (!same) ++reduction_fail;
    first_wer.Add(EditErrorRate(u.y_c, p.first.empty() ? std::vector<int>{} : p.first[0].y_c));

    std::vector<RescoreWeights> ws = grid;
    const DecodeConfig& dc = model.config().decode;
    ws.push_back({dc.w1, dc.w2, dc.w3});
    for (size_t k = 0; k < ws.size(); ++k) {
      const RescoreResult r =
          TwoGranularityRescore(p.first, p.ctc_lp, blank, &c.lexicon, ws[k], &lm);
      const int want = OracleRescore(p.first, p.ctc_lp, blank, c.lexicon, coarse_vocab, ws[k]);
      ++checks;
      const bool tie = r.best != want && std::abs(r.scored[r.best].total -
                                                  r.scored[want].total) <= 1e-9;
      if (r.best != want && !tie) ++oracle_fail;
      if (k < grid.size()) {
        grid_wer[k].Add(EditErrorRate(
            u.y_c, r.scored.empty() ? std::vector<int>{} : r.scored[r.best].y_c));
        if (r.best != 0) ++moved;
      }
    }
  }
  std::vector<double> out;
  out.push_back(first_wer.rate);
  for (const auto& g : grid_wer) out.push_back(g.rate);
  if (verdict) {
    rep->Note(Fmt("rescoring changed the first-pass pick %d times over the grid", moved));
    rep->Verdict(5, reduction_fail == 0 && oracle_fail == 0,
                 Fmt("dev %zu utts: w2=w3=0 differs from first pass on %d; rescored argmax "
                     "differs from oracle on %d of %d (utt x weight) checks",
                     c.dev.size(), reduction_fail, oracle_fail, checks),
                 Since(t0));
  }
  return out;
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

std::string List(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += Fmt("%s%.4f", s.empty() ? "" : " ", x);
  return s;
}

// 8. Per-phoneme diagnosis against the generator's planted sets. The model
// only ever hears standard pronunciations, so accented tokens show up as
// recognition errors on a labelled copy of the corpus.
void PhonemeDiagnosis(Report* rep) {
  const auto t0 = Clock::now();
  Config cfg;
  cfg.corpus.feat_dim = 8;
  cfg.corpus.accent_shift_scale = 6.0;
  cfg.corpus.accent_prior.clear();
  cfg.corpus.n_train = 1000;
  cfg.corpus.n_test = 800;
  cfg.train.epochs = 6;
  Config plain = cfg;
  plain.corpus.unlabeled_fraction = 1.0;
  Corpus train_corpus = GenerateCorpus(plain.corpus);
  Corpus eval_corpus = GenerateCorpus(cfg.corpus);
  auto model = Train(train_corpus, plain, {}).model;
  EvalResult r = Evaluate(*model, eval_corpus.test, cfg.decode, eval_corpus.lexicon,
                          ThreadCount());
  PhonemeReportInput in;
  in.hyps_f = FineHypotheses(*model, eval_corpus.lexicon, r);
  for (const Utterance& u : eval_corpus.test) {
    in.refs_f.push_back(u.y_f);
    in.accents.push_back(u.accent);
  }
  const auto& planted = eval_corpus.tables.accented_units;
  const int k = static_cast<int>(planted.front().size());
  int hits = 0, listed = 0;
  for (const AccentPhonemeReport& g : PerPhonemeReport(in, k, nullptr)) {
    if (g.accent < 0) continue;
    const std::set<int> truth(planted[g.accent].begin(), planted[g.accent].end());
    std::string top, want;
    for (int p : truth) want += Fmt(" %d", p);
    for (const TokenStat& s : g.top) {
      top += Fmt(" %d(%.2f)", s.token, s.per);
      hits += truth.count(s.token);
    }
    listed += k;  // a short list counts its missing slots as misses
    rep->Note(Fmt("accent %d planted {%s } top-%d:%s", g.accent, want.c_str(), k, top.c_str()));
  }
  const double precision = listed > 0 ? static_cast<double>(hits) / listed : 0.0;
  rep->Verdict(8, precision >= 0.8,
               Fmt("top-PER precision %.3f (%d/%d) against planted sets, test PER %.4f",
                   precision, hits, listed, r.fine_per),
               Since(t0));
}

// 9. Byte-identical metrics logs across two single-threaded runs.
void Determinism(Report* rep) {
  const auto t0 = Clock::now();
  setenv("DIMNET_TOY_THREADS", "1", 1);
  Config cfg;
  cfg.corpus.n_train = 200;
  cfg.corpus.n_dev = 40;
  cfg.train.epochs = 2;
  Corpus c = GenerateCorpus(cfg.corpus);
  std::vector<std::string> logs, ckpts;
  for (int run = 0; run < 2; ++run) {
    const std::string dir = testing::TempDir("accept_det_" + std::to_string(run));
    TrainOptions o;
    o.out_dir = dir;
    Train(c, cfg, o);
    std::ifstream log(dir + "/metrics.jsonl", std::ios::binary), ck(dir + "/model.ckpt",
                                                                   std::ios::binary);
    std::stringstream a, b;
    a << log.rdbuf();
    b << ck.rdbuf();
    logs.push_back(a.str());
    ckpts.push_back(b.str());
  }
  const bool ok = !logs[0].empty() && logs[0] == logs[1] && ckpts[0] == ckpts[1];
  rep->Verdict(9, ok,
               Fmt("two runs, seed 1, 1 thread: metrics.jsonl %zu bytes %s, checkpoint %s",
                   logs[0].size(), logs[0] == logs[1] ? "identical" : "DIFFERS",
                   ckpts[0] == ckpts[1] ? "identical" : "DIFFERS"),
               Since(t0));
}

int Main(int argc, char** argv) {
  std::string report_path;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--report" && i + 1 < argc) {
      report_path = argv[++i];
    } else {
      only.insert(std::atoi(a.c_str()));
    }
  }
  if (!report_path.empty()) std::ofstream(report_path, std::ios::trunc);
  auto want = [&](int n) { return only.empty() || only.count(n) > 0; };
  Report rep(report_path);
  const auto start = Clock::now();

  if (want(1)) CtcOracle(&rep);
  if (want(2)) GradientSuite(&rep);
  if (want(3)) DetachLaws(&rep);
  if (want(4)) RegularRule(&rep);

  if (want(5) || want(6) || want(7)) {
    const std::vector<std::uint64_t> seeds = {1, 2, 3};
    Config base;
    Corpus c = GenerateCorpus(base.corpus);

    auto t5 = Clock::now();
    std::vector<Trained> def;
    for (auto s : seeds) def.push_back(TrainOne(c, base, "default", s, &rep));
    const double t_default = Since(t5);

    std::vector<std::vector<double>> grids;  // per seed: single pass, then grid
    if (want(5) || want(7)) {
      t5 = Clock::now();
      for (size_t i = 0; i < def.size(); ++i)
        grids.push_back(RescoreReductions(def[i], c, &rep, want(5) && i == 0));
    }

    std::vector<double> wer, ar;
    for (const auto& t : def) {
      wer.push_back(t.test.wer);
      ar.push_back(t.test.ar_acc);
    }
    if (want(6)) {
      rep.Verdict(6, Mean(ar) >= 0.90 && Mean(wer) <= 0.15,
                  Fmt("3 seeds, test AR %s (mean %.4f >= 0.90), WER %s (mean %.4f <= 0.15), "
                      "training+eval %.0f s",
                      List(ar).c_str(), Mean(ar), List(wer).c_str(), Mean(wer), t_default),
                  t_default);
    }

    if (want(7)) {
      const auto t7 = Clock::now();
      auto variant = [&](const std::string& name, const std::string& key,
                         const std::string& value, const std::string& key2 = "",
                         const std::string& value2 = "") {
        Config cfg = base;
        SetConfigKey(&cfg, key, value);
        if (!key2.empty()) SetConfigKey(&cfg, key2, value2);
        std::vector<double> w, a;
        for (auto s : seeds) {
          Trained t = TrainOne(c, cfg, name, s, &rep);
          w.push_back(t.test.wer);
          a.push_back(t.test.ar_acc);
        }
        return std::make_pair(w, a);
      };
      auto [co_wer, co_ar] = variant("coarse_only", "model.units", "coarse_only");
      auto [afi_wer, afi_ar] = variant("AF_i", "model.fusion", "AF_i");
      auto [nd_wer, nd_ar] =
          variant("detach_off", "model.detach", "false", "model.detach_taps", "false");

      const bool a = Mean(ar) > Mean(co_ar);
      const bool b = Mean(wer) <= Mean(afi_wer);
      const bool cc = Mean(ar) >= Mean(nd_ar);
      rep.Note(Fmt("(a) %s  AR two-granularity %s (mean %.4f) vs coarse-only %s (mean %.4f)",
                   a ? "PASS" : "FAIL", List(ar).c_str(), Mean(ar), List(co_ar).c_str(),
                   Mean(co_ar)));
      rep.Note(Fmt("(b) %s  WER AF_ied %s (mean %.4f) vs AF_i %s (mean %.4f)",
                   b ? "PASS" : "FAIL", List(wer).c_str(), Mean(wer), List(afi_wer).c_str(),
                   Mean(afi_wer)));
      rep.Note(Fmt("(c) %s  AR detach on %s (mean %.4f) vs detach off %s (mean %.4f)",
                   cc ? "PASS" : "FAIL", List(ar).c_str(), Mean(ar), List(nd_ar).c_str(),
                   Mean(nd_ar)));

      // (d) on dev, mean over seeds, grid w1 = 1, w2 in 0.1..1.0, w3 in {0, 0.1, 0.3}.
      const auto grid = Grid();
      std::vector<double> single;
      for (const auto& g : grids) single.push_back(g[0]);
      int best = 0, at_or_below = 0, strictly = 0;
      std::vector<double> means(grid.size());
      for (size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> v;
        for (const auto& g : grids) v.push_back(g[k + 1]);
        means[k] = Mean(v);
        if (means[k] < means[best]) best = static_cast<int>(k);
        if (means[k] <= Mean(single)) ++at_or_below;
        if (means[k] < Mean(single)) ++strictly;
      }
      std::vector<double> best_seeds;
      for (const auto& g : grids) best_seeds.push_back(g[best + 1]);
      const bool d = at_or_below > 0;
      rep.Note(Fmt("(d) %s  dev WER single pass %s (mean %.4f); best grid point w2=%.1f w3=%.1f "
                   "%s (mean %.4f); %d/%zu points <= single pass, %d strictly below",
                   d ? "PASS" : "FAIL", List(single).c_str(), Mean(single), grid[best].w2,
                   grid[best].w3, List(best_seeds).c_str(), means[best], at_or_below,
                   grid.size(), strictly));
      rep.Verdict(7, a && b && cc && d,
                  Fmt("ablation orderings (a) %s (b) %s (c) %s (d) %s", a ? "ok" : "violated",
                      b ? "ok" : "violated", cc ? "ok" : "violated", d ? "ok" : "violated"),
                  Since(t7));
    }
  }

  if (want(8)) PhonemeDiagnosis(&rep);
  if (want(9)) Determinism(&rep);

  std::printf("total %.0f s, %s\n", Since(start), rep.failed() ? "FAILED" : "all passed");
  return rep.failed() ? 1 : 0;
}

}  // namespace
}  // namespace dimnet

int main(int argc, char** argv) {
  try {
    return dimnet::Main(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: %s\n", e.what());
    return 2;
  }
}

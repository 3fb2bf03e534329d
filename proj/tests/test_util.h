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

#ifndef DIMNET_TESTS_TEST_UTIL_H_
#define DIMNET_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "dimnet/autograd.h"
#include "dimnet/config.h"

namespace dimnet::testing {

// Small enough that a forward/backward pass takes well under a millisecond.
inline Config TinyConfig(std::uint64_t seed = 1) {
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
  c.corpus.n_train = 8;
  c.corpus.n_dev = 4;
  c.corpus.n_test = 4;
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
  c.model.seed = seed;
  c.train.epochs = 1;
  c.train.batch_size = 4;
  c.train.warmup_steps = 2;
  c.decode.beam = 3;
  return c;
}

inline Eigen::MatrixXd RandomMatrix(int rows, int cols, std::mt19937_64* rng,
                                    double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(*rng);
  return m;
}

inline Eigen::MatrixXd RandomLogSoftmax(int rows, int cols, std::mt19937_64* rng,
                                        double scale = 1.5) {
  Eigen::MatrixXd m = RandomMatrix(rows, cols, rng, scale);
  for (int r = 0; r < rows; ++r) {
    const double mx = m.row(r).maxCoeff();
    const double lse = mx + std::log((m.row(r).array() - mx).exp().sum());
    m.row(r).array() -= lse;
  }
  return m;
}

// Moves every parameter off its structured init (zeros, ones).
inline void Jitter(ag::ParamStore* store, std::mt19937_64* rng, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  for (int i = 0; i < store->size(); ++i) {
    ag::Mat& v = store->at(i).value;
    for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] += nd(*rng);
  }
}

// d(loss)/d(every parameter) for one scalar node.
inline ag::GradBuffer GradientsOf(const ag::ParamStore& store, ag::Graph& g, ag::Var loss) {
  g.Backward(loss);
  ag::GradBuffer gb(store);
  g.AccumulateParamGrads(&gb);
  return gb;
}

// Fresh empty directory under the system temp dir.
inline std::string TempDir(const std::string& tag) {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / ("dimnet_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

}  // namespace dimnet::testing

#endif  // DIMNET_TESTS_TEST_UTIL_H_

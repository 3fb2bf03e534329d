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

#ifndef DIMNET_GRAD_CHECK_H_
#define DIMNET_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimnet/autograd.h"

namespace dimnet {

// f returns the value at x and, when grad != nullptr, the analytic gradient.
using ScalarFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

double RelativeError(double analytic, double numeric);

// Max over coordinates of |a - n| / (|a| + |n| + 1e-12) with central
// differences. Non-finite values raise NumericsError.
double GradCheck(const ScalarFn& f, const Eigen::VectorXd& x, double eps);

struct GradCheckOptions {
  double eps = 1e-5;
  int max_coords_per_tensor = 0;  // 0: every coordinate
  std::uint64_t seed = 1;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst;  // "param[row,col]"
  long checked = 0;
};

// Same check against every parameter of `store`; `loss` rebuilds the scalar
// on the graph it is given.
GradCheckReport GradCheckParams(ag::ParamStore* store,
                                const std::function<ag::Var(ag::Graph&)>& loss,
                                const GradCheckOptions& opts);

struct GradSuiteEntry {
  std::string name;
  GradCheckReport report;
};

// Finite-difference checks over each encoder block kind, the decoder layer,
// the accent branch, both cross-entropies, the CTC loss and the full
// multi-task loss on a 2-utterance batch, all at a small width.
std::vector<GradSuiteEntry> RunGradSuite(std::uint64_t seed = 1,
                                         const GradCheckOptions& opts = {});

}  // namespace dimnet

#endif  // DIMNET_GRAD_CHECK_H_

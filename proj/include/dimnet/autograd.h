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

#ifndef DIMNET_AUTOGRAD_H_
#define DIMNET_AUTOGRAD_H_

// Tape-based reverse-mode differentiation over dense double matrices.
//
// A Graph records every node in creation order, so reverse creation order is
// a valid topological order for Backward(). Parameters enter a graph as
// leaves that reference the parameter storage without copying it; their
// gradients are read back with Graph::ParamGrads().

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace dimnet::ag {

using Mat = Eigen::MatrixXd;

struct Parameter {
  std::string name;
  Mat value;
  int index = 0;
};

// Owns the trainable tensors of a model in registration order.
class ParamStore {
 public:
  Parameter* Add(const std::string& name, int rows, int cols);
  Parameter* Find(const std::string& name);
  const Parameter* Find(const std::string& name) const;

  int size() const { return static_cast<int>(params_.size()); }
  Parameter& at(int i) { return *params_[i]; }
  const Parameter& at(int i) const { return *params_[i]; }
  long long NumScalars() const;

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, int> by_name_;
};

// Dense gradient accumulator aligned with a ParamStore.
class GradBuffer {
 public:
  GradBuffer() = default;
  explicit GradBuffer(const ParamStore& store);

  void Zero();
  void Add(const GradBuffer& other, double scale = 1.0);
  void Scale(double s);
  double SquaredNorm() const;
  bool AllFinite() const;

  int size() const { return static_cast<int>(grads_.size()); }
  Mat& at(int i) { return grads_[i]; }
  const Mat& at(int i) const { return grads_[i]; }

 private:
  std::vector<Mat> grads_;
};

class Graph;

class Var {
 public:
  Var() = default;
  Var(Graph* g, int id) : g_(g), id_(id) {}

  const Mat& val() const;
  Eigen::Index rows() const { return val().rows(); }
  Eigen::Index cols() const { return val().cols(); }
  bool requires_grad() const;
  bool valid() const { return g_ != nullptr; }
  Graph* graph() const { return g_; }
  int id() const { return id_; }

 private:
  Graph* g_ = nullptr;
  int id_ = -1;
};

class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, int self)>;

  // With grad_enabled = false no backward closures are recorded.
  explicit Graph(bool grad_enabled = true) : grad_enabled_(grad_enabled) {
    nodes_.reserve(256);
  }
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var Constant(Mat value);
  Var Param(const Parameter& p);
  // Same value, no gradient path back to `v`.
  Var Detach(Var v);

  // Creates a node. `backward` runs only if some parent requires a grad.
  Var Make(Mat value, std::initializer_list<Var> parents, BackwardFn backward);
  Var Make(Mat value, const std::vector<Var>& parents, BackwardFn backward);

  void Backward(Var scalar);
  // Adds d(scalar)/d(param) into `out` for every parameter leaf touched.
  void AccumulateParamGrads(GradBuffer* out, double scale = 1.0) const;

  const Mat& val(int id) const {
    const Node& n = nodes_[id];
    return n.external ? *n.external : n.value;
  }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  // Gradient slot of node `id`, zero-allocated on first access.
  Mat& grad(int id);
  bool has_grad(int id) const { return nodes_[id].grad.size() > 0; }
  bool grad_enabled() const { return grad_enabled_; }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Mat value;
    const Mat* external = nullptr;
    Mat grad;
    bool requires_grad = false;
    int param_index = -1;
    BackwardFn backward;
  };

  bool grad_enabled_;
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_nodes_;
};

inline const Mat& Var::val() const { return g_->val(id_); }
inline bool Var::requires_grad() const { return g_->requires_grad(id_); }

// ---- Ops -----------------------------------------------------------------

Var MatMul(Var a, Var b);
// a * b^T
Var MatMulNT(Var a, Var b);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
// Adds a 1xN row to every row of a.
Var AddRow(Var a, Var row);
Var Mul(Var a, Var b);
Var Scale(Var a, double s);
Var Swish(Var a);
Var Sigmoid(Var a);
Var Tanh(Var a);
// Gated linear unit over the column halves: left * sigmoid(right).
Var Glu(Var a);
Var LayerNorm(Var x, Var gamma, Var beta, double eps = 1e-5);
// Row-wise softmax; with `causal`, entries above the diagonal are masked.
Var Softmax(Var a, bool causal = false);
Var LogSoftmax(Var a);
Var ConcatCols(const std::vector<Var>& parts);
Var SliceCols(Var a, int start, int count);
// Sums consecutive column blocks of width `block`: TxNB -> TxN.
Var BlockSumCols(Var a, int block);
Var MeanRows(Var a);
Var RepeatRows(Var row, int times);
// Per-channel convolution along time with zero "same" padding.
Var DepthwiseConv1d(Var x, Var kernel, Var bias);
// Stacks `factor` consecutive frames into one row, zero-padding the tail.
Var FrameStack(Var x, int factor);
Var GatherRows(Var table, const std::vector<int>& ids);
Var Sum(Var a);
// sum_i weights[i] * parts[i] over 1x1 scalars.
Var WeightedSum(const std::vector<Var>& parts,
                const std::vector<double>& weights);

}  // namespace dimnet::ag

#endif  // DIMNET_AUTOGRAD_H_

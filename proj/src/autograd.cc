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

#include "dimnet/autograd.h"

#include <cmath>
#include <limits>

#include "dimnet/error.h"

namespace dimnet::ag {

Parameter* ParamStore::Add(const std::string& name, int rows, int cols) {
  if (by_name_.count(name)) Fail(ErrorCode::kConfig, "duplicate parameter " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Mat::Zero(rows, cols);
  p->index = static_cast<int>(params_.size());
  by_name_[name] = p->index;
  params_.push_back(std::move(p));
  return params_.back().get();
}

Parameter* ParamStore::Find(const std::string& name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : params_[it->second].get();
}

const Parameter* ParamStore::Find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : params_[it->second].get();
}

long long ParamStore::NumScalars() const {
  long long n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

GradBuffer::GradBuffer(const ParamStore& store) {
  grads_.reserve(store.size());
  for (int i = 0; i < store.size(); ++i) {
    const Mat& v = store.at(i).value;
    grads_.push_back(Mat::Zero(v.rows(), v.cols()));
  }
}

void GradBuffer::Zero() {
  for (auto& g : grads_) g.setZero();
}

void GradBuffer::Add(const GradBuffer& other, double scale) {
  for (size_t i = 0; i < grads_.size(); ++i) grads_[i] += scale * other.grads_[i];
}

void GradBuffer::Scale(double s) {
  for (auto& g : grads_) g *= s;
}

double GradBuffer::SquaredNorm() const {
  double n = 0.0;
  for (const auto& g : grads_) n += g.squaredNorm();
  return n;
}

bool GradBuffer::AllFinite() const {
  for (const auto& g : grads_) {
    if (!g.allFinite()) return false;
  }
  return true;
}

Var Graph::Constant(Mat value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, size() - 1);
}

Var Graph::Param(const Parameter& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return Var(this, it->second);
  Node n;
  n.external = &p.value;
  n.requires_grad = grad_enabled_;
  n.param_index = p.index;
  nodes_.push_back(std::move(n));
  param_nodes_[&p] = size() - 1;
  return Var(this, size() - 1);
}

Var Graph::Detach(Var v) { return Constant(v.val()); }

Var Graph::Make(Mat value, std::initializer_list<Var> parents,
                BackwardFn backward) {
  bool rg = false;
  if (grad_enabled_) {
    for (const Var& p : parents) rg = rg || requires_grad(p.id());
  }
  Node n;
  n.value = std::move(value);
  n.requires_grad = rg;
  if (rg) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, size() - 1);
}

Var Graph::Make(Mat value, const std::vector<Var>& parents,
                BackwardFn backward) {
  bool rg = false;
  if (grad_enabled_) {
    for (const Var& p : parents) rg = rg || requires_grad(p.id());
  }
  Node n;
  n.value = std::move(value);
  n.requires_grad = rg;
  if (rg) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, size() - 1);
}

Mat& Graph::grad(int id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) {
    const Mat& v = val(id);
    n.grad = Mat::Zero(v.rows(), v.cols());
  }
  return n.grad;
}

void Graph::Backward(Var scalar) {
  DIMNET_CHECK_SHAPE(scalar.rows() == 1 && scalar.cols() == 1,
                     "Backward needs a 1x1 scalar");
  if (!requires_grad(scalar.id())) return;
  grad(scalar.id())(0, 0) += 1.0;
  for (int id = scalar.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.backward && n.grad.size() > 0) n.backward(*this, id);
  }
}

void Graph::AccumulateParamGrads(GradBuffer* out, double scale) const {
  for (const auto& [param, id] : param_nodes_) {
    const Node& n = nodes_[id];
    if (n.grad.size() > 0) out->at(n.param_index) += scale * n.grad;
  }
}

namespace {

Graph* G(Var a) { return a.graph(); }

void AddGrad(Graph& g, Var v, const Mat& d) {
  if (g.requires_grad(v.id())) g.grad(v.id()) += d;
}

template <typename Expr>
void AddGradExpr(Graph& g, Var v, const Expr& d) {
  if (g.requires_grad(v.id())) g.grad(v.id()) += d;
}

}  // namespace

Var MatMul(Var a, Var b) {
  DIMNET_CHECK_SHAPE(a.cols() == b.rows(), "MatMul inner dimension mismatch");
  Mat out = a.val() * b.val();
  return G(a)->Make(std::move(out), {a, b}, [a, b](Graph& g, int self) {
    const Mat& go = g.grad(self);
    if (g.requires_grad(a.id())) g.grad(a.id()).noalias() += go * b.val().transpose();
    if (g.requires_grad(b.id())) g.grad(b.id()).noalias() += a.val().transpose() * go;
  });
}

Var MatMulNT(Var a, Var b) {
  DIMNET_CHECK_SHAPE(a.cols() == b.cols(), "MatMulNT inner dimension mismatch");
  Mat out = a.val() * b.val().transpose();
  return G(a)->Make(std::move(out), {a, b}, [a, b](Graph& g, int self) {
    const Mat& go = g.grad(self);
    if (g.requires_grad(a.id())) g.grad(a.id()).noalias() += go * b.val();
    if (g.requires_grad(b.id())) g.grad(b.id()).noalias() += go.transpose() * a.val();
  });
}

Var Add(Var a, Var b) {
  DIMNET_CHECK_SHAPE(a.rows() == b.rows() && a.cols() == b.cols(),
                     "Add shape mismatch");
  Mat out = a.val() + b.val();
  return G(a)->Make(std::move(out), {a, b}, [a, b](Graph& g, int self) {
    const Mat& go = g.grad(self);
    AddGrad(g, a, go);
    AddGrad(g, b, go);
  });
}

Var Sub(Var a, Var b) {
  DIMNET_CHECK_SHAPE(a.rows() == b.rows() && a.cols() == b.cols(),
                     "Sub shape mismatch");
  Mat out = a.val() - b.val();
  return G(a)->Make(std::move(out), {a, b}, [a, b](Graph& g, int self) {
    const Mat& go = g.grad(self);
    AddGrad(g, a, go);
    AddGradExpr(g, b, -go);
  });
}

Var AddRow(Var a, Var row) {
  DIMNET_CHECK_SHAPE(row.rows() == 1 && row.cols() == a.cols(),
                     "AddRow expects a 1xN row matching columns");
  Mat out = a.val().rowwise() + row.val().row(0);
  return G(a)->Make(std::move(out), {a, row}, [a, row](Graph& g, int self) {
    const Mat& go = g.grad(self);
    AddGrad(g, a, go);
    AddGradExpr(g, row, go.colwise().sum());
  });
}

Var Mul(Var a, Var b) {
  DIMNET_CHECK_SHAPE(a.rows() == b.rows() && a.cols() == b.cols(),
                     "Mul shape mismatch");
  Mat out = a.val().cwiseProduct(b.val());
  return G(a)->Make(std::move(out), {a, b}, [a, b](Graph& g, int self) {
    const Mat& go = g.grad(self);
    AddGradExpr(g, a, go.cwiseProduct(b.val()));
    AddGradExpr(g, b, go.cwiseProduct(a.val()));
  });
}

Var Scale(Var a, double s) {
  Mat out = a.val() * s;
  return G(a)->Make(std::move(out), {a}, [a, s](Graph& g, int self) {
    AddGradExpr(g, a, g.grad(self) * s);
  });
}

Var Sigmoid(Var a) {
  Mat out = (1.0 + (-a.val().array()).exp()).inverse().matrix();
  return G(a)->Make(std::move(out), {a}, [a](Graph& g, int self) {
    const Mat& y = g.val(self);
    AddGradExpr(g, a, (g.grad(self).array() * y.array() * (1.0 - y.array())).matrix());
  });
}

Var Swish(Var a) {
  Mat sig = (1.0 + (-a.val().array()).exp()).inverse().matrix();
  Mat out = a.val().cwiseProduct(sig);
  return G(a)->Make(std::move(out), {a},
                    [a, sig = std::move(sig)](Graph& g, int self) {
    const auto x = a.val().array();
    const auto s = sig.array();
    AddGradExpr(g, a, (g.grad(self).array() * (s + x * s * (1.0 - s))).matrix());
  });
}

Var Tanh(Var a) {
  Mat out = a.val().array().tanh().matrix();
  return G(a)->Make(std::move(out), {a}, [a](Graph& g, int self) {
    const Mat& y = g.val(self);
    AddGradExpr(g, a, (g.grad(self).array() * (1.0 - y.array().square())).matrix());
  });
}

Var Glu(Var a) {
  DIMNET_CHECK_SHAPE(a.cols() % 2 == 0, "Glu needs an even column count");
  const int h = static_cast<int>(a.cols() / 2);
  Mat sig = (1.0 + (-a.val().rightCols(h).array()).exp()).inverse().matrix();
  Mat out = a.val().leftCols(h).cwiseProduct(sig);
  return G(a)->Make(std::move(out), {a},
                    [a, h, sig = std::move(sig)](Graph& g, int self) {
    if (!g.requires_grad(a.id())) return;
    const Mat& go = g.grad(self);
    Mat& ga = g.grad(a.id());
    const auto left = a.val().leftCols(h).array();
    ga.leftCols(h).array() += go.array() * sig.array();
    ga.rightCols(h).array() +=
        go.array() * left * sig.array() * (1.0 - sig.array());
  });
}

Var LayerNorm(Var x, Var gamma, Var beta, double eps) {
  const Mat& xv = x.val();
  const Eigen::Index d = xv.cols();
  DIMNET_CHECK_SHAPE(gamma.cols() == d && beta.cols() == d,
                     "LayerNorm parameter width mismatch");
  Eigen::VectorXd mean = xv.rowwise().mean();
  Mat centered = xv.colwise() - mean;
  Eigen::VectorXd inv_std =
      ((centered.array().square().rowwise().sum() / static_cast<double>(d)) + eps)
          .rsqrt()
          .matrix();
  Mat xhat = centered.array().colwise() * inv_std.array();
  Mat out = (xhat.array().rowwise() * gamma.val().row(0).array()).rowwise() +
            beta.val().row(0).array();
  return G(x)->Make(
      std::move(out), {x, gamma, beta},
      [x, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std)](
          Graph& g, int self) {
        const Mat& go = g.grad(self);
        const double d = static_cast<double>(go.cols());
        AddGradExpr(g, gamma, go.cwiseProduct(xhat).colwise().sum());
        AddGradExpr(g, beta, go.colwise().sum());
        if (!g.requires_grad(x.id())) return;
        Mat dxhat = go.array().rowwise() * gamma.val().row(0).array();
        Eigen::VectorXd m1 = dxhat.rowwise().mean();
        Eigen::VectorXd m2 = dxhat.cwiseProduct(xhat).rowwise().sum() / d;
        Mat dx = dxhat.colwise() - m1;
        dx -= (xhat.array().colwise() * m2.array()).matrix();
        dx = dx.array().colwise() * inv_std.array();
        g.grad(x.id()) += dx;
      });
}

Var Softmax(Var a, bool causal) {
  Mat out = a.val();
  const Eigen::Index rows = out.rows(), cols = out.cols();
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index lim = causal ? std::min<Eigen::Index>(r + 1, cols) : cols;
    double mx = out.row(r).head(lim).maxCoeff();
    double z = 0.0;
    for (Eigen::Index c = 0; c < lim; ++c) {
      out(r, c) = std::exp(out(r, c) - mx);
      z += out(r, c);
    }
    for (Eigen::Index c = 0; c < lim; ++c) out(r, c) /= z;
    for (Eigen::Index c = lim; c < cols; ++c) out(r, c) = 0.0;
  }
  return G(a)->Make(std::move(out), {a}, [a](Graph& g, int self) {
    const Mat& y = g.val(self);
    const Mat& go = g.grad(self);
    Eigen::VectorXd dot = go.cwiseProduct(y).rowwise().sum();
    AddGradExpr(g, a, (y.array() * (go.colwise() - dot).array()).matrix());
  });
}

Var LogSoftmax(Var a) {
  const Mat& x = a.val();
  Eigen::VectorXd mx = x.rowwise().maxCoeff();
  Mat shifted = x.colwise() - mx;
  Eigen::VectorXd lse = shifted.array().exp().rowwise().sum().log().matrix();
  Mat out = shifted.colwise() - lse;
  return G(a)->Make(std::move(out), {a}, [a](Graph& g, int self) {
    const Mat& y = g.val(self);
    const Mat& go = g.grad(self);
    Eigen::VectorXd s = go.rowwise().sum();
    AddGradExpr(g, a, go - (y.array().exp().colwise() * s.array()).matrix());
  });
}

Var ConcatCols(const std::vector<Var>& parts) {
  DIMNET_CHECK_SHAPE(!parts.empty(), "ConcatCols of nothing");
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    DIMNET_CHECK_SHAPE(p.rows() == rows, "ConcatCols row mismatch");
    cols += p.cols();
  }
  Mat out(rows, cols);
  Eigen::Index off = 0;
  for (const Var& p : parts) {
    out.middleCols(off, p.cols()) = p.val();
    off += p.cols();
  }
  return G(parts[0])->Make(std::move(out), parts, [parts](Graph& g, int self) {
    const Mat& go = g.grad(self);
    Eigen::Index off = 0;
    for (const Var& p : parts) {
      AddGradExpr(g, p, go.middleCols(off, p.cols()));
      off += p.cols();
    }
  });
}

Var SliceCols(Var a, int start, int count) {
  DIMNET_CHECK_SHAPE(start >= 0 && count >= 0 && start + count <= a.cols(),
                     "SliceCols out of range");
  Mat out = a.val().middleCols(start, count);
  return G(a)->Make(std::move(out), {a}, [a, start, count](Graph& g, int self) {
    if (g.requires_grad(a.id()))
      g.grad(a.id()).middleCols(start, count) += g.grad(self);
  });
}

Var BlockSumCols(Var a, int block) {
  DIMNET_CHECK_SHAPE(block > 0 && a.cols() % block == 0,
                     "BlockSumCols width not divisible by block");
  const int n = static_cast<int>(a.cols() / block);
  Mat out(a.rows(), n);
  for (int i = 0; i < n; ++i)
    out.col(i) = a.val().middleCols(i * block, block).rowwise().sum();
  return G(a)->Make(std::move(out), {a}, [a, block, n](Graph& g, int self) {
    if (!g.requires_grad(a.id())) return;
    const Mat& go = g.grad(self);
    Mat& ga = g.grad(a.id());
    for (int i = 0; i < n; ++i)
      ga.middleCols(i * block, block).colwise() += go.col(i);
  });
}

Var MeanRows(Var a) {
  DIMNET_CHECK_SHAPE(a.rows() > 0, "MeanRows of empty matrix");
  Mat out = a.val().colwise().mean();
  return G(a)->Make(std::move(out), {a}, [a](Graph& g, int self) {
    if (!g.requires_grad(a.id())) return;
    const double inv = 1.0 / static_cast<double>(a.rows());
    g.grad(a.id()).rowwise() += g.grad(self).row(0) * inv;
  });
}

Var RepeatRows(Var row, int times) {
  DIMNET_CHECK_SHAPE(row.rows() == 1 && times >= 1, "RepeatRows expects 1xN");
  Mat out = row.val().replicate(times, 1);
  return G(row)->Make(std::move(out), {row}, [row](Graph& g, int self) {
    AddGradExpr(g, row, g.grad(self).colwise().sum());
  });
}

Var DepthwiseConv1d(Var x, Var kernel, Var bias) {
  const Mat& xv = x.val();
  const Mat& k = kernel.val();
  const int T = static_cast<int>(xv.rows());
  const int K = static_cast<int>(k.rows());
  DIMNET_CHECK_SHAPE(k.cols() == xv.cols() && bias.cols() == xv.cols(),
                     "DepthwiseConv1d channel mismatch");
  const int pad = K / 2;
  Mat out = bias.val().replicate(T, 1);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < K; ++j) {
      const int s = t + j - pad;
      if (s < 0 || s >= T) continue;
      out.row(t).array() += xv.row(s).array() * k.row(j).array();
    }
  }
  return G(x)->Make(std::move(out), {x, kernel, bias},
                    [x, kernel, bias, T, K, pad](Graph& g, int self) {
    const Mat& go = g.grad(self);
    AddGradExpr(g, bias, go.colwise().sum());
    const bool gx = g.requires_grad(x.id());
    const bool gk = g.requires_grad(kernel.id());
    for (int t = 0; t < T; ++t) {
      for (int j = 0; j < K; ++j) {
        const int s = t + j - pad;
        if (s < 0 || s >= T) continue;
        if (gx)
          g.grad(x.id()).row(s).array() +=
              go.row(t).array() * kernel.val().row(j).array();
        if (gk)
          g.grad(kernel.id()).row(j).array() +=
              go.row(t).array() * x.val().row(s).array();
      }
    }
  });
}

Var FrameStack(Var x, int factor) {
  DIMNET_CHECK_SHAPE(factor >= 1, "FrameStack factor must be >= 1");
  const int T0 = static_cast<int>(x.rows());
  const int F = static_cast<int>(x.cols());
  const int T = (T0 + factor - 1) / factor;
  Mat out = Mat::Zero(T, static_cast<Eigen::Index>(F) * factor);
  for (int t = 0; t < T0; ++t) out.block(t / factor, (t % factor) * F, 1, F) = x.val().row(t);
  return G(x)->Make(std::move(out), {x}, [x, factor, T0, F](Graph& g, int self) {
    if (!g.requires_grad(x.id())) return;
    const Mat& go = g.grad(self);
    Mat& gx = g.grad(x.id());
    for (int t = 0; t < T0; ++t) gx.row(t) += go.block(t / factor, (t % factor) * F, 1, F);
  });
}

Var GatherRows(Var table, const std::vector<int>& ids) {
  Mat out(static_cast<Eigen::Index>(ids.size()), table.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.rows())
      Fail(ErrorCode::kIndexOutOfRange, "GatherRows id " + std::to_string(ids[i]));
    out.row(static_cast<Eigen::Index>(i)) = table.val().row(ids[i]);
  }
  return G(table)->Make(std::move(out), {table}, [table, ids](Graph& g, int self) {
    if (!g.requires_grad(table.id())) return;
    const Mat& go = g.grad(self);
    Mat& gt = g.grad(table.id());
    for (size_t i = 0; i < ids.size(); ++i) gt.row(ids[i]) += go.row(static_cast<Eigen::Index>(i));
  });
}

Var Sum(Var a) {
  Mat out(1, 1);
  out(0, 0) = a.val().sum();
  return G(a)->Make(std::move(out), {a}, [a](Graph& g, int self) {
    if (!g.requires_grad(a.id())) return;
    g.grad(a.id()).array() += g.grad(self)(0, 0);
  });
}

Var WeightedSum(const std::vector<Var>& parts, const std::vector<double>& weights) {
  DIMNET_CHECK_SHAPE(!parts.empty() && parts.size() == weights.size(),
                     "WeightedSum arity mismatch");
  Mat out = Mat::Zero(1, 1);
  for (size_t i = 0; i < parts.size(); ++i) {
    DIMNET_CHECK_SHAPE(parts[i].rows() == 1 && parts[i].cols() == 1,
                       "WeightedSum expects scalars");
    if (weights[i] != 0.0) out(0, 0) += weights[i] * parts[i].val()(0, 0);
  }
  return G(parts[0])->Make(std::move(out), parts, [parts, weights](Graph& g, int self) {
    const double go = g.grad(self)(0, 0);
    for (size_t i = 0; i < parts.size(); ++i) {
      if (weights[i] != 0.0 && g.requires_grad(parts[i].id()))
        g.grad(parts[i].id())(0, 0) += weights[i] * go;
    }
  });
}

}  // namespace dimnet::ag

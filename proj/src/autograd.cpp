// src/autograd.cpp

// Copyright 2026  The speechground Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "speechground/autograd.hpp"

#include <cmath>
#include <numbers>

namespace speechground::ag {

const Matrix &Var::value() const { return tape_->ValueOf(index_); }

double Var::scalar() const {
  const Matrix &v = value();
  if (v.size() != 1) throw Error("scalar() on a non-scalar node");
  return v(0, 0);
}

Var Tape::Constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Scalar(double value) { return Constant(Matrix::Constant(1, 1, value)); }

Var Tape::Param(Parameter &p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return Var(this, it->second);
  Node n;
  n.external = &p.value;
  n.requires_grad = grad_enabled_;
  n.param = &p;
  nodes_.push_back(std::move(n));
  int idx = static_cast<int>(nodes_.size()) - 1;
  param_nodes_[&p] = idx;
  return Var(this, idx);
}

const Matrix &Tape::ValueOf(int i) const {
  const Node &n = nodes_[i];
  return n.external ? *n.external : n.value;
}

Matrix &Tape::GradOf(int i) {
  Node &n = nodes_[i];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(ValueOf(i).rows(), ValueOf(i).cols());
  return n.grad;
}

Var Tape::Push(Matrix value, std::initializer_list<Var> inputs, BackwardFn backward) {
  return Push(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
              std::move(backward));
}

Var Tape::Push(Matrix value, std::span<const Var> inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  if (grad_enabled_) {
    for (const Var &v : inputs) {
      if (v.tape() != this) throw Error("mixing nodes from different tapes");
      n.requires_grad = n.requires_grad || nodes_[v.index()].requires_grad;
    }
    if (n.requires_grad) n.backward = std::move(backward);
  }
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::Backward(const Var &loss) {
  if (!grad_enabled_) throw Error("Backward on a tape with gradients disabled");
  if (loss.value().size() != 1) throw Error("Backward needs a scalar loss");
  GradOf(loss.index())(0, 0) += 1.0;
  for (int i = loss.index(); i >= 0; --i) {
    Node &n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) {
      n.backward(*this, i);
    } else if (n.param) {
      if (n.param->grad.size() == 0) n.param->grad = Matrix::Zero(n.grad.rows(), n.grad.cols());
      n.param->grad += n.grad;
    }
  }
}

namespace {

// Accumulates only into inputs that need it.
template <typename Fn>
void IfGrad(Tape &t, const Var &v, Fn &&fn) {
  if (t.RequiresGrad(v.index())) fn(t.GradOf(v.index()));
}

}  // namespace

Var MatMul(const Var &a, const Var &b) {
  if (a.cols() != b.rows()) throw Error("MatMul shape mismatch");
  Tape &t = *a.tape();
  return t.Push(a.value() * b.value(), {a, b}, [a, b](Tape &t, int self) {
    const Matrix &g = t.OutGrad(self);
    IfGrad(t, a, [&](Matrix &ga) { ga.noalias() += g * b.value().transpose(); });
    IfGrad(t, b, [&](Matrix &gb) { gb.noalias() += a.value().transpose() * g; });
  });
}

Var MatMulNT(const Var &a, const Var &b) {
  if (a.cols() != b.cols()) throw Error("MatMulNT shape mismatch");
  Tape &t = *a.tape();
  return t.Push(a.value() * b.value().transpose(), {a, b}, [a, b](Tape &t, int self) {
    const Matrix &g = t.OutGrad(self);
    IfGrad(t, a, [&](Matrix &ga) { ga.noalias() += g * b.value(); });
    IfGrad(t, b, [&](Matrix &gb) { gb.noalias() += g.transpose() * a.value(); });
  });
}

Var Transpose(const Var &a) {
  Tape &t = *a.tape();
  return t.Push(a.value().transpose(), {a}, [a](Tape &t, int self) {
    IfGrad(t, a, [&](Matrix &ga) { ga += t.OutGrad(self).transpose(); });
  });
}

Var Add(const Var &a, const Var &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("Add shape mismatch");
  Tape &t = *a.tape();
  return t.Push(a.value() + b.value(), {a, b}, [a, b](Tape &t, int self) {
    const Matrix &g = t.OutGrad(self);
    IfGrad(t, a, [&](Matrix &ga) { ga += g; });
    IfGrad(t, b, [&](Matrix &gb) { gb += g; });
  });
}

Var Sub(const Var &a, const Var &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("Sub shape mismatch");
  Tape &t = *a.tape();
  return t.Push(a.value() - b.value(), {a, b}, [a, b](Tape &t, int self) {
    const Matrix &g = t.OutGrad(self);
    IfGrad(t, a, [&](Matrix &ga) { ga += g; });
    IfGrad(t, b, [&](Matrix &gb) { gb -= g; });
  });
}

Var AddRow(const Var &a, const Var &row) {
  if (row.rows() != 1 || row.cols() != a.cols()) throw Error("AddRow shape mismatch");
  Tape &t = *a.tape();
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  return t.Push(std::move(out), {a, row}, [a, row](Tape &t, int self) {
    const Matrix &g = t.OutGrad(self);
    IfGrad(t, a, [&](Matrix &ga) { ga += g; });
    IfGrad(t, row, [&](Matrix &gr) { gr += g.colwise().sum(); });
  });
}

Var Scale(const Var &a, double s) {
  Tape &t = *a.tape();
  return t.Push(a.value() * s, {a}, [a, s](Tape &t, int self) {
    IfGrad(t, a, [&](Matrix &ga) { ga += s * t.OutGrad(self); });
  });
}

namespace {
constexpr double kGeluK = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluC = 0.044715;
}  // namespace

Var Gelu(const Var &a) {
  Tape &t = *a.tape();
  const Matrix &x = a.value();
  // tanh(u) = 1 - 2 / (1 + exp(2u)), using Eigen's vectorized exp.
  auto u = (kGeluK * (x.array() + kGeluC * x.array().cube())).eval();
  Matrix th = (1.0 - 2.0 / (1.0 + (2.0 * u).exp())).matrix();
  Matrix out = (0.5 * x.array() * (1.0 + th.array())).matrix();
  if (!t.grad_enabled()) return t.Push(std::move(out), {a}, nullptr);
  return t.Push(std::move(out), {a}, [a, th = std::move(th)](Tape &t, int self) {
    IfGrad(t, a, [&](Matrix &ga) {
      const Matrix &x = a.value();
      const Matrix &g = t.OutGrad(self);
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        double v = x.data()[i];
        double h = th.data()[i];
        double d = 0.5 * (1.0 + h) + 0.5 * v * (1.0 - h * h) * kGeluK * (1.0 + 3.0 * kGeluC * v * v);
        ga.data()[i] += g.data()[i] * d;
      }
    });
  });
}

Var LogClamped(const Var &a, double floor) {
  Tape &t = *a.tape();
  Matrix out = a.value().cwiseMax(floor).array().log().matrix();
  return t.Push(std::move(out), {a}, [a, floor](Tape &t, int self) {
    IfGrad(t, a, [&](Matrix &ga) {
      const Matrix &x = a.value();
      const Matrix &g = t.OutGrad(self);
      for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x.data()[i] > floor) ga.data()[i] += g.data()[i] / x.data()[i];
    });
  });
}

Var SoftmaxRows(const Var &a) {
  Tape &t = *a.tape();
  Matrix y = a.value();
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    double m = y.row(r).maxCoeff();
    y.row(r) = (y.row(r).array() - m).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  return t.Push(std::move(y), {a}, [a](Tape &t, int self) {
    IfGrad(t, a, [&](Matrix &ga) {
      const Matrix &y = t.ValueOf(self);
      const Matrix &g = t.OutGrad(self);
      Eigen::VectorXd dots = (g.cwiseProduct(y)).rowwise().sum();
      for (Eigen::Index r = 0; r < y.rows(); ++r)
        ga.row(r) += y.row(r).cwiseProduct((g.row(r).array() - dots[r]).matrix());
    });
  });
}

Var LogSoftmaxRows(const Var &a) {
  Tape &t = *a.tape();
  Matrix y = a.value();
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    double m = y.row(r).maxCoeff();
    double lse = m + std::log((y.row(r).array() - m).exp().sum());
    y.row(r).array() -= lse;
  }
  return t.Push(std::move(y), {a}, [a](Tape &t, int self) {
    IfGrad(t, a, [&](Matrix &ga) {
      const Matrix &y = t.ValueOf(self);
      const Matrix &g = t.OutGrad(self);
      Eigen::VectorXd sums = g.rowwise().sum();
      for (Eigen::Index r = 0; r < y.rows(); ++r)
        ga.row(r) += g.row(r) - (y.row(r).array().exp() * sums[r]).matrix();
    });
  });
}

Var NormalizeRows(const Var &a) {
  Tape &t = *a.tape();
  const Matrix &x = a.value();
  Eigen::VectorXd norms = x.rowwise().norm();
  if ((norms.array() <= 0.0).any()) throw Error("cannot normalize a zero-norm row");
  Matrix y = norms.cwiseInverse().asDiagonal() * x;
  return t.Push(std::move(y), {a}, [a, norms](Tape &t, int self) {
    IfGrad(t, a, [&](Matrix &ga) {
      const Matrix &y = t.ValueOf(self);
      const Matrix &g = t.OutGrad(self);
      for (Eigen::Index r = 0; r < y.rows(); ++r) {
        double d = y.row(r).dot(g.row(r));
        ga.row(r) += (g.row(r) - d * y.row(r)) / norms[r];
      }
    });
  });
}

Var ColMax(const Var &a) {
  Tape &t = *a.tape();
  const Matrix &x = a.value();
  if (x.rows() == 0) throw Error("ColMax of an empty matrix");
  Matrix out(1, x.cols());
  std::vector<int> arg(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Eigen::Index r;
    out(0, c) = x.col(c).maxCoeff(&r);
    arg[c] = static_cast<int>(r);
  }
  return t.Push(std::move(out), {a}, [a, arg = std::move(arg)](Tape &t, int self) {
    IfGrad(t, a, [&](Matrix &ga) {
      const Matrix &g = t.OutGrad(self);
      for (size_t c = 0; c < arg.size(); ++c) ga(arg[c], c) += g(0, c);
    });
  });
}

Var MeanRows(const Var &a) {
  Tape &t = *a.tape();
  double n = static_cast<double>(a.rows());
  return t.Push(a.value().colwise().mean(), {a}, [a, n](Tape &t, int self) {
    IfGrad(t, a, [&](Matrix &ga) { ga.rowwise() += t.OutGrad(self).row(0) / n; });
  });
}

Var Sum(const Var &a) {
  Tape &t = *a.tape();
  return t.Push(Matrix::Constant(1, 1, a.value().sum()), {a}, [a](Tape &t, int self) {
    IfGrad(t, a, [&](Matrix &ga) { ga.array() += t.OutGrad(self)(0, 0); });
  });
}

Var Pick(const Var &a, int row, int col) {
  Tape &t = *a.tape();
  return t.Push(Matrix::Constant(1, 1, a.value()(row, col)), {a},
                [a, row, col](Tape &t, int self) {
                  IfGrad(t, a, [&](Matrix &ga) { ga(row, col) += t.OutGrad(self)(0, 0); });
                });
}

Var RepeatRows(const Var &row, int n) {
  if (row.rows() != 1) throw Error("RepeatRows expects a single row");
  Tape &t = *row.tape();
  Matrix out = row.value().replicate(n, 1);
  return t.Push(std::move(out), {row}, [row](Tape &t, int self) {
    IfGrad(t, row, [&](Matrix &gr) { gr += t.OutGrad(self).colwise().sum(); });
  });
}

Var Rows(const Var &a, int start, int count) {
  Tape &t = *a.tape();
  return t.Push(a.value().middleRows(start, count), {a}, [a, start, count](Tape &t, int self) {
    IfGrad(t, a, [&](Matrix &ga) { ga.middleRows(start, count) += t.OutGrad(self); });
  });
}

Var Cols(const Var &a, int start, int count) {
  Tape &t = *a.tape();
  return t.Push(a.value().middleCols(start, count), {a}, [a, start, count](Tape &t, int self) {
    IfGrad(t, a, [&](Matrix &ga) { ga.middleCols(start, count) += t.OutGrad(self); });
  });
}

Var ConcatRows(std::span<const Var> parts) {
  if (parts.empty()) throw Error("ConcatRows of nothing");
  Tape &t = *parts[0].tape();
  Eigen::Index rows = 0, cols = parts[0].cols();
  for (const Var &p : parts) {
    if (p.cols() != cols) throw Error("ConcatRows column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (const Var &p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return t.Push(std::move(out), parts, [inputs = std::move(inputs)](Tape &t, int self) {
    const Matrix &g = t.OutGrad(self);
    Eigen::Index r = 0;
    for (const Var &p : inputs) {
      IfGrad(t, p, [&](Matrix &gp) { gp += g.middleRows(r, p.rows()); });
      r += p.rows();
    }
  });
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) throw Error("ConcatCols of nothing");
  Tape &t = *parts[0].tape();
  Eigen::Index rows = parts[0].rows(), cols = 0;
  for (const Var &p : parts) {
    if (p.rows() != rows) throw Error("ConcatCols row mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (const Var &p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return t.Push(std::move(out), parts, [inputs = std::move(inputs)](Tape &t, int self) {
    const Matrix &g = t.OutGrad(self);
    Eigen::Index c = 0;
    for (const Var &p : inputs) {
      IfGrad(t, p, [&](Matrix &gp) { gp += g.middleCols(c, p.cols()); });
      c += p.cols();
    }
  });
}

Var GatherRows(const Var &table, std::span<const int> ids) {
  Tape &t = *table.tape();
  const Matrix &tab = table.value();
  Matrix out(static_cast<Eigen::Index>(ids.size()), tab.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= tab.rows()) throw Error("GatherRows index out of range");
    out.row(i) = tab.row(ids[i]);
  }
  std::vector<int> idx(ids.begin(), ids.end());
  return t.Push(std::move(out), {table}, [table, idx = std::move(idx)](Tape &t, int self) {
    IfGrad(t, table, [&](Matrix &gt) {
      const Matrix &g = t.OutGrad(self);
      for (size_t i = 0; i < idx.size(); ++i) gt.row(idx[i]) += g.row(i);
    });
  });
}

Var SegmentMax(const Var &x, std::span<const int> offsets, const Var &fallback) {
  if (offsets.size() < 2) throw Error("SegmentMax needs at least one segment");
  if (fallback.rows() != 1 || fallback.cols() != x.cols())
    throw Error("SegmentMax fallback shape mismatch");
  Tape &t = *x.tape();
  const Matrix &v = x.value();
  const int segments = static_cast<int>(offsets.size()) - 1;
  const Eigen::Index cols = v.cols();
  Matrix out(segments, cols);
  // arg[s * cols + c] = source row, or -1 for the fallback.
  std::vector<int> arg(static_cast<size_t>(segments) * cols, -1);
  for (int s = 0; s < segments; ++s) {
    int lo = offsets[s], hi = offsets[s + 1];
    if (lo == hi) {
      out.row(s) = fallback.value().row(0);
      continue;
    }
    out.row(s) = v.row(lo);
    for (Eigen::Index c = 0; c < cols; ++c) arg[s * cols + c] = lo;
    for (int r = lo + 1; r < hi; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (v(r, c) > out(s, c)) {
          out(s, c) = v(r, c);
          arg[s * cols + c] = r;
        }
      }
    }
  }
  return t.Push(std::move(out), {x, fallback},
                [x, fallback, arg = std::move(arg), cols](Tape &t, int self) {
    const Matrix &g = t.OutGrad(self);
    const Eigen::Index segments = g.rows();
    IfGrad(t, x, [&](Matrix &gx) {
      for (Eigen::Index s = 0; s < segments; ++s)
        for (Eigen::Index c = 0; c < cols; ++c)
          if (int r = arg[s * cols + c]; r >= 0) gx(r, c) += g(s, c);
    });
    IfGrad(t, fallback, [&](Matrix &gf) {
      for (Eigen::Index s = 0; s < segments; ++s)
        if (arg[s * cols] < 0) gf.row(0) += g.row(s);
    });
  });
}

}  // namespace speechground::ag

// include/speechground/autograd.hpp

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

#ifndef SPEECHGROUND_AUTOGRAD_HPP_
#define SPEECHGROUND_AUTOGRAD_HPP_

#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "speechground/common.hpp"
#include "speechground/matrix.hpp"

namespace speechground::ag {

/// A named trainable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  const Matrix &value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;
  Tape *tape() const { return tape_; }
  int index() const { return index_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape *tape, int index) : tape_(tape), index_(index) {}
  Tape *tape_ = nullptr;
  int index_ = -1;
};

/// Reverse-mode recording of one forward pass. With gradients disabled the
/// tape only stores values, which is what evaluation uses.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape &, int self)>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) { nodes_.reserve(1024); }
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  Var Constant(Matrix value);
  Var Scalar(double value);
  /// Leaf bound to a parameter; repeated calls return the same node.
  Var Param(Parameter &p);

  /// Seeds d(loss)=1 and accumulates into every reachable Parameter::grad.
  void Backward(const Var &loss);

  bool grad_enabled() const { return grad_enabled_; }
  size_t size() const { return nodes_.size(); }

  // Op construction interface.
  Var Push(Matrix value, std::initializer_list<Var> inputs, BackwardFn backward);
  Var Push(Matrix value, std::span<const Var> inputs, BackwardFn backward);
  const Matrix &ValueOf(int i) const;
  /// Gradient buffer of node i, zero-initialized on first use.
  Matrix &GradOf(int i);
  const Matrix &OutGrad(int i) const { return nodes_[i].grad; }
  bool RequiresGrad(int i) const { return nodes_[i].requires_grad; }

 private:
  struct Node {
    Matrix value;
    const Matrix *external = nullptr;
    Matrix grad;
    bool requires_grad = false;
    Parameter *param = nullptr;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
  std::unordered_map<Parameter *, int> param_nodes_;
  bool grad_enabled_;
};

// Linear algebra.
Var MatMul(const Var &a, const Var &b);
/// a * b^T
Var MatMulNT(const Var &a, const Var &b);
Var Transpose(const Var &a);

// Elementwise.
Var Add(const Var &a, const Var &b);
Var Sub(const Var &a, const Var &b);
/// Adds a 1 x C row to every row of a.
Var AddRow(const Var &a, const Var &row);
Var Scale(const Var &a, double s);
/// Tanh-approximated GELU.
Var Gelu(const Var &a);
/// log(max(x, floor)); no gradient where the clamp is active.
Var LogClamped(const Var &a, double floor);

// Row-wise normalizations.
Var SoftmaxRows(const Var &a);
Var LogSoftmaxRows(const Var &a);
/// Each row scaled to unit L2 norm; throws Error on a zero row.
Var NormalizeRows(const Var &a);

// Reductions and reshaping.
/// 1 x C column-wise maximum (first row wins ties).
Var ColMax(const Var &a);
Var MeanRows(const Var &a);
Var Sum(const Var &a);
Var Pick(const Var &a, int row, int col);
Var RepeatRows(const Var &row, int n);
Var Rows(const Var &a, int start, int count);
Var Cols(const Var &a, int start, int count);
Var ConcatRows(std::span<const Var> parts);
Var ConcatCols(std::span<const Var> parts);
/// Rows of `table` selected by `ids` (embedding lookup).
Var GatherRows(const Var &table, std::span<const int> ids);
/// Column-wise max over each row segment [offsets[s], offsets[s+1]); empty
/// segments take the 1 x C `fallback` row.
Var SegmentMax(const Var &x, std::span<const int> offsets, const Var &fallback);

}  // namespace speechground::ag

#endif  // SPEECHGROUND_AUTOGRAD_HPP_

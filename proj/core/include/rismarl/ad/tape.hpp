// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "rismarl/ad/param_store.hpp"

namespace rismarl::ad {

class Tape;

/// Handle to a node on a tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Reverse-mode tape over dense matrices. Column vectors are n x 1 matrices.
/// Gradients of parameter leaves accumulate into Parameter::grad.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, int self)>;

  Var constant(Mat value);
  Var param(Parameter& p);

  const Mat& value(Var v) const;
  double scalar(Var v) const;
  bool needs_grad(Var v) const { return nodes_[v.id].needs_grad; }
  /// Gradient of the last backward() target with respect to a non-parameter node.
  Mat grad(Var v) const;

  /// Seeds d(out)/d(out) = 1 for a 1 x 1 output and propagates. Node gradients
  /// from any earlier call are discarded first; parameter gradients accumulate.
  void backward(Var out);

  std::size_t size() const { return nodes_.size(); }

  // used by operation implementations
  Var push(Mat value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var push(Mat value, const std::vector<Var>& inputs, BackwardFn fn);
  const Mat& node_grad(int id) const { return nodes_[id].grad; }
  void accumulate(Var target, const Mat& g);

 private:
  struct Node {
    Mat value;
    const Mat* ref = nullptr;
    Parameter* param = nullptr;
    Mat grad;
    bool needs_grad = false;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
};

enum class Activation { Identity, Tanh, Sigmoid, Relu, Elu, Abs };
enum class Aggregation { Sum, Mean, Max };

Var matmul(Tape& t, Var a, Var b);
Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
Var mul(Tape& t, Var a, Var b);  // elementwise
Var scale(Tape& t, Var a, double c);
Var add_scalar(Tape& t, Var a, double c);
/// W x + b with x a column vector.
Var affine(Tape& t, Var w, Var x, Var b);
Var activate(Tape& t, Var x, Activation act);
Var tanh(Tape& t, Var x);
Var sigmoid(Tape& t, Var x);
Var relu(Tape& t, Var x);
Var elu(Tape& t, Var x);
Var abs(Tape& t, Var x);
Var exp(Tape& t, Var x);
/// Elementwise clamp; gradient passes only where the input is strictly inside.
Var clamp(Tape& t, Var x, double lo, double hi);
/// Vertical concatenation of column vectors.
Var concat(Tape& t, const std::vector<Var>& parts);
Var slice(Tape& t, Var x, int start, int length);
/// Column-major reshape.
Var reshape(Tape& t, Var x, int rows, int cols);
Var sum(Tape& t, Var x);
Var dot(Tape& t, Var a, Var b);
Var square(Tape& t, Var x);

/// Elementwise reduction over a set of equal-size column vectors. Inputs are
/// reduced in lexicographic order of their values, so any permutation of the
/// set gives a bitwise identical result. Empty set gives zeros of `dim`.
/// Max routes the gradient to the first maximal input in that order.
Var aggregate(Tape& t, Aggregation kind, const std::vector<Var>& items, int dim);

Var log_softmax(Tape& t, Var x);
/// Sum over entries of the diagonal-Gaussian log density of `sample`.
Var gaussian_logprob(Tape& t, Var mean, Var log_std, const Mat& sample);
/// Sum over entries of log Bernoulli(sample | sigmoid(logits)).
Var bernoulli_logprob(Tape& t, Var logits, const Eigen::VectorXi& sample);
/// `logits` holds `rows` consecutive groups of `classes` logits; sums log p(index).
Var categorical_logprob(Tape& t, Var logits, int classes, const Eigen::VectorXi& index);

}  // namespace rismarl::ad

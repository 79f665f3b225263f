// SPDX-License-Identifier: Apache-2.0
#include "rismarl/ad/tape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rismarl/common.hpp"

namespace rismarl::ad {

Var Tape::constant(Mat value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(Parameter& p) {
  Node n;
  n.ref = &p.value;
  n.param = &p;
  n.needs_grad = true;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Mat& Tape::value(Var v) const {
  const auto& n = nodes_[v.id];
  return n.ref ? *n.ref : n.value;
}

double Tape::scalar(Var v) const {
  const auto& m = value(v);
  require(m.size() == 1, "Tape::scalar: node is not 1 x 1");
  return m(0, 0);
}

Mat Tape::grad(Var v) const {
  const auto& n = nodes_[v.id];
  if (n.grad.size() == 0) return Mat::Zero(value(v).rows(), value(v).cols());
  return n.grad;
}

Var Tape::push(Mat value, std::initializer_list<Var> inputs, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  for (auto in : inputs) n.needs_grad = n.needs_grad || nodes_[in.id].needs_grad;
  if (n.needs_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::push(Mat value, const std::vector<Var>& inputs, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  for (auto in : inputs) n.needs_grad = n.needs_grad || nodes_[in.id].needs_grad;
  if (n.needs_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::accumulate(Var target, const Mat& g) {
  auto& n = nodes_[target.id];
  if (!n.needs_grad) return;
  if (n.param) {
    n.param->grad += g;
  } else if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::backward(Var out) {
  require(value(out).size() == 1, "Tape::backward: output must be 1 x 1");
  for (auto& n : nodes_) n.grad.resize(0, 0);
  if (!nodes_[out.id].needs_grad) return;
  nodes_[out.id].grad = Mat::Ones(1, 1);
  for (int i = out.id; i >= 0; --i) {
    auto& n = nodes_[i];
    if (n.grad.size() == 0 || !n.backward) continue;
    n.backward(*this, i);
  }
}

// ---------------------------------------------------------------------------

Var matmul(Tape& t, Var a, Var b) {
  require(t.value(a).cols() == t.value(b).rows(), "matmul: shape mismatch");
  return t.push(t.value(a) * t.value(b), {a, b}, [a, b](Tape& t, int self) {
    const Mat& g = t.node_grad(self);
    if (t.needs_grad(a)) t.accumulate(a, g * t.value(b).transpose());
    if (t.needs_grad(b)) t.accumulate(b, t.value(a).transpose() * g);
  });
}

Var add(Tape& t, Var a, Var b) {
  require(t.value(a).rows() == t.value(b).rows() && t.value(a).cols() == t.value(b).cols(), "add: shape mismatch");
  return t.push(t.value(a) + t.value(b), {a, b}, [a, b](Tape& t, int self) {
    t.accumulate(a, t.node_grad(self));
    t.accumulate(b, t.node_grad(self));
  });
}

Var sub(Tape& t, Var a, Var b) {
  require(t.value(a).rows() == t.value(b).rows() && t.value(a).cols() == t.value(b).cols(), "sub: shape mismatch");
  return t.push(t.value(a) - t.value(b), {a, b}, [a, b](Tape& t, int self) {
    t.accumulate(a, t.node_grad(self));
    t.accumulate(b, -t.node_grad(self));
  });
}

Var mul(Tape& t, Var a, Var b) {
  require(t.value(a).rows() == t.value(b).rows() && t.value(a).cols() == t.value(b).cols(), "mul: shape mismatch");
  return t.push(t.value(a).cwiseProduct(t.value(b)), {a, b}, [a, b](Tape& t, int self) {
    const Mat& g = t.node_grad(self);
    if (t.needs_grad(a)) t.accumulate(a, g.cwiseProduct(t.value(b)));
    if (t.needs_grad(b)) t.accumulate(b, g.cwiseProduct(t.value(a)));
  });
}

Var scale(Tape& t, Var a, double c) {
  return t.push(t.value(a) * c, {a}, [a, c](Tape& t, int self) { t.accumulate(a, t.node_grad(self) * c); });
}

Var add_scalar(Tape& t, Var a, double c) {
  return t.push(t.value(a).array() + c, {a}, [a](Tape& t, int self) { t.accumulate(a, t.node_grad(self)); });
}

Var affine(Tape& t, Var w, Var x, Var b) {
  const Mat& W = t.value(w);
  const Mat& X = t.value(x);
  require(X.cols() == 1 && W.cols() == X.rows(), "affine: shape mismatch");
  require(t.value(b).rows() == W.rows() && t.value(b).cols() == 1, "affine: bias shape mismatch");
  Mat y = t.value(b);
  y.noalias() += W * X;
  return t.push(std::move(y), {w, x, b}, [w, x, b](Tape& t, int self) {
    const Mat& g = t.node_grad(self);
    if (t.needs_grad(w)) t.accumulate(w, g * t.value(x).transpose());
    if (t.needs_grad(x)) t.accumulate(x, t.value(w).transpose() * g);
    t.accumulate(b, g);
  });
}

Var tanh(Tape& t, Var x) {
  Mat y = t.value(x).array().tanh().matrix();
  return t.push(y, {x}, [x](Tape& t, int self) {
    const Mat& y = t.value(Var{self});
    t.accumulate(x, t.node_grad(self).cwiseProduct((1.0 - y.array().square()).matrix()));
  });
}

Var sigmoid(Tape& t, Var x) {
  Mat y = (1.0 / (1.0 + (-t.value(x).array()).exp())).matrix();
  return t.push(y, {x}, [x](Tape& t, int self) {
    const Mat& y = t.value(Var{self});
    t.accumulate(x, t.node_grad(self).cwiseProduct((y.array() * (1.0 - y.array())).matrix()));
  });
}

Var relu(Tape& t, Var x) {
  Mat y = t.value(x).cwiseMax(0.0);
  return t.push(y, {x}, [x](Tape& t, int self) {
    t.accumulate(x, t.node_grad(self).cwiseProduct((t.value(x).array() > 0.0).cast<double>().matrix()));
  });
}

Var elu(Tape& t, Var x) {
  const Mat& v = t.value(x);
  Mat y = (v.array() > 0.0).select(v.array(), v.array().exp() - 1.0).matrix();
  return t.push(y, {x}, [x](Tape& t, int self) {
    const Mat& v = t.value(x);
    Mat d = (v.array() > 0.0).select(Eigen::ArrayXXd::Ones(v.rows(), v.cols()), v.array().exp()).matrix();
    t.accumulate(x, t.node_grad(self).cwiseProduct(d));
  });
}

Var abs(Tape& t, Var x) {
  return t.push(t.value(x).cwiseAbs(), {x}, [x](Tape& t, int self) {
    const Mat& v = t.value(x);
    Mat s = v.unaryExpr([](double z) { return z > 0 ? 1.0 : (z < 0 ? -1.0 : 0.0); });
    t.accumulate(x, t.node_grad(self).cwiseProduct(s));
  });
}

Var exp(Tape& t, Var x) {
  Mat y = t.value(x).array().exp().matrix();
  return t.push(y, {x}, [x](Tape& t, int self) {
    t.accumulate(x, t.node_grad(self).cwiseProduct(t.value(Var{self})));
  });
}

Var activate(Tape& t, Var x, Activation act) {
  switch (act) {
    case Activation::Identity:
      return x;
    case Activation::Tanh:
      return tanh(t, x);
    case Activation::Sigmoid:
      return sigmoid(t, x);
    case Activation::Relu:
      return relu(t, x);
    case Activation::Elu:
      return elu(t, x);
    case Activation::Abs:
      return abs(t, x);
  }
  return x;
}

Var clamp(Tape& t, Var x, double lo, double hi) {
  return t.push(t.value(x).cwiseMax(lo).cwiseMin(hi), {x}, [x, lo, hi](Tape& t, int self) {
    const Mat& v = t.value(x);
    Mat mask = ((v.array() > lo) && (v.array() < hi)).cast<double>().matrix();
    t.accumulate(x, t.node_grad(self).cwiseProduct(mask));
  });
}

Var concat(Tape& t, const std::vector<Var>& parts) {
  Eigen::Index rows = 0;
  for (auto p : parts) {
    require(t.value(p).cols() == 1, "concat: inputs must be column vectors");
    rows += t.value(p).rows();
  }
  Mat y(rows, 1);
  Eigen::Index at = 0;
  for (auto p : parts) {
    y.middleRows(at, t.value(p).rows()) = t.value(p);
    at += t.value(p).rows();
  }
  return t.push(std::move(y), parts, [parts](Tape& t, int self) {
    const Mat& g = t.node_grad(self);
    Eigen::Index at = 0;
    for (auto p : parts) {
      const auto n = t.value(p).rows();
      if (t.needs_grad(p)) t.accumulate(p, g.middleRows(at, n));
      at += n;
    }
  });
}

Var slice(Tape& t, Var x, int start, int length) {
  const Mat& v = t.value(x);
  require(v.cols() == 1 && start >= 0 && length >= 0 && start + length <= v.rows(), "slice: out of range");
  return t.push(v.middleRows(start, length), {x}, [x, start, length](Tape& t, int self) {
    Mat g = Mat::Zero(t.value(x).rows(), 1);
    g.middleRows(start, length) = t.node_grad(self);
    t.accumulate(x, g);
  });
}

Var reshape(Tape& t, Var x, int rows, int cols) {
  const Mat& v = t.value(x);
  require(static_cast<Eigen::Index>(rows) * cols == v.size(), "reshape: size mismatch");
  Mat y = Eigen::Map<const Mat>(v.data(), rows, cols);
  const auto r0 = v.rows(), c0 = v.cols();
  return t.push(std::move(y), {x}, [x, r0, c0](Tape& t, int self) {
    const Mat& g = t.node_grad(self);
    t.accumulate(x, Eigen::Map<const Mat>(g.data(), r0, c0));
  });
}

Var sum(Tape& t, Var x) {
  Mat y(1, 1);
  y(0, 0) = t.value(x).sum();
  return t.push(std::move(y), {x}, [x](Tape& t, int self) {
    const double g = t.node_grad(self)(0, 0);
    t.accumulate(x, Mat::Constant(t.value(x).rows(), t.value(x).cols(), g));
  });
}

Var dot(Tape& t, Var a, Var b) { return sum(t, mul(t, a, b)); }

Var square(Tape& t, Var x) { return mul(t, x, x); }

Var aggregate(Tape& t, Aggregation kind, const std::vector<Var>& items, int dim) {
  if (items.empty()) return t.constant(Mat::Zero(dim, 1));
  for (auto v : items) require(t.value(v).rows() == dim && t.value(v).cols() == 1, "aggregate: dimension mismatch");
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Mat& x = t.value(items[a]);
    const Mat& y = t.value(items[b]);
    return std::lexicographical_compare(x.data(), x.data() + dim, y.data(), y.data() + dim);
  });
  std::vector<Var> sorted;
  for (auto i : order) sorted.push_back(items[i]);
  const double n = static_cast<double>(sorted.size());
  if (kind == Aggregation::Max) {
    Mat y = t.value(sorted[0]);
    std::vector<int> arg(dim, 0);
    for (std::size_t k = 1; k < sorted.size(); ++k) {
      const Mat& v = t.value(sorted[k]);
      for (int r = 0; r < dim; ++r)
        if (v(r, 0) > y(r, 0)) {
          y(r, 0) = v(r, 0);
          arg[r] = static_cast<int>(k);
        }
    }
    return t.push(std::move(y), sorted, [sorted, arg, dim](Tape& t, int self) {
      const Mat& g = t.node_grad(self);
      for (std::size_t k = 0; k < sorted.size(); ++k) {
        Mat gk = Mat::Zero(dim, 1);
        bool any = false;
        for (int r = 0; r < dim; ++r)
          if (arg[r] == static_cast<int>(k)) {
            gk(r, 0) = g(r, 0);
            any = true;
          }
        if (any) t.accumulate(sorted[k], gk);
      }
    });
  }
  Mat y = t.value(sorted[0]);
  for (std::size_t k = 1; k < sorted.size(); ++k) y += t.value(sorted[k]);
  const double f = kind == Aggregation::Mean ? 1.0 / n : 1.0;
  if (kind == Aggregation::Mean) y *= f;
  return t.push(std::move(y), sorted, [sorted, f](Tape& t, int self) {
    const Mat g = t.node_grad(self) * f;
    for (auto v : sorted) t.accumulate(v, g);
  });
}

Var log_softmax(Tape& t, Var x) {
  const Mat& v = t.value(x);
  require(v.cols() == 1, "log_softmax: column vector expected");
  const double mx = v.maxCoeff();
  const double lse = mx + std::log((v.array() - mx).exp().sum());
  Mat y = (v.array() - lse).matrix();
  return t.push(std::move(y), {x}, [x](Tape& t, int self) {
    const Mat& g = t.node_grad(self);
    const Mat p = t.value(Var{self}).array().exp().matrix();
    t.accumulate(x, g - p * g.sum());
  });
}

Var gaussian_logprob(Tape& t, Var mean, Var log_std, const Mat& sample) {
  const Mat& mu = t.value(mean);
  const Mat& ls = t.value(log_std);
  require(mu.rows() == sample.rows() && mu.cols() == sample.cols() && ls.rows() == mu.rows() && ls.cols() == mu.cols(),
          "gaussian_logprob: shape mismatch");
  const Eigen::ArrayXXd sigma = ls.array().exp();
  const Eigen::ArrayXXd z = (sample.array() - mu.array()) / sigma;
  Mat y(1, 1);
  y(0, 0) = (-0.5 * z.square() - ls.array() - 0.5 * std::log(2.0 * kPi)).sum();
  return t.push(std::move(y), {mean, log_std}, [mean, log_std, sample](Tape& t, int self) {
    const double g = t.node_grad(self)(0, 0);
    const Eigen::ArrayXXd sigma = t.value(log_std).array().exp();
    const Eigen::ArrayXXd z = (sample.array() - t.value(mean).array()) / sigma;
    if (t.needs_grad(mean)) t.accumulate(mean, (g * z / sigma).matrix());
    if (t.needs_grad(log_std)) t.accumulate(log_std, (g * (z.square() - 1.0)).matrix());
  });
}

Var bernoulli_logprob(Tape& t, Var logits, const Eigen::VectorXi& sample) {
  const Mat& l = t.value(logits);
  require(l.cols() == 1 && l.rows() == sample.size(), "bernoulli_logprob: shape mismatch");
  double lp = 0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double x = l(i, 0);
    const double softplus = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    lp += sample(i) * x - softplus;
  }
  Mat y(1, 1);
  y(0, 0) = lp;
  return t.push(std::move(y), {logits}, [logits, sample](Tape& t, int self) {
    const double g = t.node_grad(self)(0, 0);
    const Mat& l = t.value(logits);
    Mat d(l.rows(), 1);
    for (Eigen::Index i = 0; i < l.rows(); ++i) d(i, 0) = g * (sample(i) - 1.0 / (1.0 + std::exp(-l(i, 0))));
    t.accumulate(logits, d);
  });
}

Var categorical_logprob(Tape& t, Var logits, int classes, const Eigen::VectorXi& index) {
  const Mat& l = t.value(logits);
  require(classes >= 1 && l.cols() == 1 && l.rows() == classes * index.size(), "categorical_logprob: shape mismatch");
  const Eigen::Index groups = index.size();
  Mat probs(l.rows(), 1);
  double lp = 0;
  for (Eigen::Index r = 0; r < groups; ++r) {
    require(index(r) >= 0 && index(r) < classes, "categorical_logprob: index out of range");
    const auto seg = l.middleRows(r * classes, classes);
    const double mx = seg.maxCoeff();
    const double lse = mx + std::log((seg.array() - mx).exp().sum());
    probs.middleRows(r * classes, classes) = (seg.array() - lse).exp().matrix();
    lp += seg(index(r), 0) - lse;
  }
  Mat y(1, 1);
  y(0, 0) = lp;
  return t.push(std::move(y), {logits}, [logits, classes, index, probs](Tape& t, int self) {
    const double g = t.node_grad(self)(0, 0);
    Mat d = -g * probs;
    for (Eigen::Index r = 0; r < index.size(); ++r) d(r * classes + index(r), 0) += g;
    t.accumulate(logits, d);
  });
}

}  // namespace rismarl::ad

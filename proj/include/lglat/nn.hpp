#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lglat/mat.hpp"
#include "lglat/rng.hpp"

namespace lglat::nn {

// Reverse-mode tape over dense matrices. Ops append nodes in creation order;
// backward() replays them in reverse. Leaves (parameters, constants) live
// outside the tape and only receive gradient accumulation.
template <typename T>
struct Node {
  Mat<T> val;
  Mat<T> grad;  // empty until something accumulates into it
  bool requires_grad = false;
  std::function<void()> backprop;

  void accum(const Mat<T>& g) {
    if (grad.size() == 0)
      grad = g;
    else
      grad += g;
  }
  bool has_grad() const { return grad.size() != 0; }
};

template <typename T>
using Var = std::shared_ptr<Node<T>>;

template <typename T>
Var<T> leaf(Mat<T> value, bool requires_grad = false) {
  auto n = std::make_shared<Node<T>>();
  n->val = std::move(value);
  n->requires_grad = requires_grad;
  return n;
}

template <typename T>
class Tape {
 public:
  Var<T> record(Mat<T> value, bool requires_grad, std::function<void()> backprop) {
    auto n = std::make_shared<Node<T>>();
    n->val = std::move(value);
    n->requires_grad = requires_grad;
    if (requires_grad) n->backprop = std::move(backprop);
    nodes_.push_back(n);
    return n;
  }

  void backward(const Var<T>& root) {
    if (root->val.rows() != 1 || root->val.cols() != 1)
      throw std::logic_error("backward expects a scalar root");
    root->accum(Mat<T>::Ones(1, 1));
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      Node<T>& n = **it;
      if (n.requires_grad && n.has_grad() && n.backprop) n.backprop();
    }
  }

  void clear() { nodes_.clear(); }
  size_t size() const { return nodes_.size(); }

 private:
  std::vector<Var<T>> nodes_;
};

namespace detail {
template <typename T>
bool any_grad(std::initializer_list<const Var<T>*> vars) {
  for (const Var<T>* v : vars)
    if ((*v)->requires_grad) return true;
  return false;
}
}  // namespace detail

// Every op takes tape == nullptr for plain evaluation (no graph built).

template <typename T>
Var<T> matmul(Tape<T>* tape, const Var<T>& a, const Var<T>& b) {
  Mat<T> v = a->val * b->val;
  if (!tape || !detail::any_grad<T>({&a, &b})) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, b, out]() {
    if (a->requires_grad) a->accum(out->grad * b->val.transpose());
    if (b->requires_grad) b->accum(a->val.transpose() * out->grad);
  };
  return out;
}

// a * b^T without materializing the transpose
template <typename T>
Var<T> matmul_nt(Tape<T>* tape, const Var<T>& a, const Var<T>& b) {
  Mat<T> v = a->val * b->val.transpose();
  if (!tape || !detail::any_grad<T>({&a, &b})) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, b, out]() {
    if (a->requires_grad) a->accum(out->grad * b->val);
    if (b->requires_grad) b->accum(out->grad.transpose() * a->val);
  };
  return out;
}

template <typename T>
Var<T> add(Tape<T>* tape, const Var<T>& a, const Var<T>& b) {
  Mat<T> v = a->val + b->val;
  if (!tape || !detail::any_grad<T>({&a, &b})) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, b, out]() {
    if (a->requires_grad) a->accum(out->grad);
    if (b->requires_grad) b->accum(out->grad);
  };
  return out;
}

// broadcast a 1 x n bias over every row
template <typename T>
Var<T> add_rowvec(Tape<T>* tape, const Var<T>& a, const Var<T>& bias) {
  Mat<T> v = a->val.rowwise() + bias->val.row(0);
  if (!tape || !detail::any_grad<T>({&a, &bias})) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, bias, out]() {
    if (a->requires_grad) a->accum(out->grad);
    if (bias->requires_grad) bias->accum(out->grad.colwise().sum());
  };
  return out;
}

template <typename T>
Var<T> mul(Tape<T>* tape, const Var<T>& a, const Var<T>& b) {
  Mat<T> v = a->val.cwiseProduct(b->val);
  if (!tape || !detail::any_grad<T>({&a, &b})) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, b, out]() {
    if (a->requires_grad) a->accum(out->grad.cwiseProduct(b->val));
    if (b->requires_grad) b->accum(out->grad.cwiseProduct(a->val));
  };
  return out;
}

// alpha * a + beta, elementwise
template <typename T>
Var<T> affine(Tape<T>* tape, const Var<T>& a, T alpha, T beta) {
  Mat<T> v = (a->val.array() * alpha + beta).matrix();
  if (!tape || !a->requires_grad) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, out, alpha]() { a->accum(out->grad * alpha); };
  return out;
}

template <typename T>
Var<T> scale(Tape<T>* tape, const Var<T>& a, T alpha) {
  return affine(tape, a, alpha, T(0));
}

template <typename T>
Var<T> relu(Tape<T>* tape, const Var<T>& a) {
  Mat<T> v = a->val.cwiseMax(T(0));
  if (!tape || !a->requires_grad) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, out]() {
    Mat<T> g = (a->val.array() > T(0)).template cast<T>().matrix().cwiseProduct(out->grad);
    a->accum(g);
  };
  return out;
}

template <typename T>
Var<T> sigmoid(Tape<T>* tape, const Var<T>& a) {
  Mat<T> v = (T(1) / (T(1) + (-a->val.array()).exp())).matrix();
  if (!tape || !a->requires_grad) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, out]() {
    Mat<T> s = out->val;
    a->accum(out->grad.cwiseProduct(s.cwiseProduct((Mat<T>::Ones(s.rows(), s.cols()) - s))));
  };
  return out;
}

// row-wise softmax; with causal = true, column j > row i is masked out
template <typename T>
Var<T> softmax_rows(Tape<T>* tape, const Var<T>& a, bool causal = false) {
  Mat<T> v = a->val;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    Eigen::Index valid = causal ? std::min<Eigen::Index>(i + 1, v.cols()) : v.cols();
    T mx = v.row(i).head(valid).maxCoeff();
    T sum = T(0);
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (j < valid) {
        v(i, j) = std::exp(v(i, j) - mx);
        sum += v(i, j);
      } else {
        v(i, j) = T(0);
      }
    }
    v.row(i) /= sum;
  }
  if (!tape || !a->requires_grad) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, out]() {
    const Mat<T>& s = out->val;
    Mat<T> g = out->grad.cwiseProduct(s);
    Eigen::Matrix<T, Eigen::Dynamic, 1> rowdot = g.rowwise().sum();
    Mat<T> da = g - s.cwiseProduct(rowdot.replicate(1, s.cols()));
    a->accum(da);
  };
  return out;
}

template <typename T>
Var<T> layer_norm(Tape<T>* tape, const Var<T>& x, const Var<T>& gamma, const Var<T>& beta,
                  T eps = T(1e-5)) {
  const Eigen::Index rows = x->val.rows(), cols = x->val.cols();
  Mat<T> xhat(rows, cols);
  Eigen::Matrix<T, Eigen::Dynamic, 1> inv_std(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    T mean = x->val.row(i).mean();
    T var = (x->val.row(i).array() - mean).square().mean();
    T istd = T(1) / std::sqrt(var + eps);
    inv_std(i) = istd;
    xhat.row(i) = ((x->val.row(i).array() - mean) * istd).matrix();
  }
  Mat<T> v = (xhat.array().rowwise() * gamma->val.row(0).array()).matrix().rowwise() +
             beta->val.row(0);
  if (!tape || !detail::any_grad<T>({&x, &gamma, &beta})) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [x, gamma, beta, out, xhat, inv_std]() {
    const Mat<T>& g = out->grad;
    if (beta->requires_grad) beta->accum(g.colwise().sum());
    if (gamma->requires_grad) gamma->accum(g.cwiseProduct(xhat).colwise().sum());
    if (x->requires_grad) {
      const Eigen::Index cols = g.cols();
      Mat<T> dxhat = (g.array().rowwise() * gamma->val.row(0).array()).matrix();
      Mat<T> dx(g.rows(), cols);
      for (Eigen::Index i = 0; i < g.rows(); ++i) {
        T m1 = dxhat.row(i).mean();
        T m2 = dxhat.row(i).cwiseProduct(xhat.row(i)).mean();
        dx.row(i) =
            ((dxhat.row(i).array() - m1 - xhat.row(i).array() * m2) * inv_std(i)).matrix();
      }
      x->accum(dx);
    }
  };
  return out;
}

// rows of a parameter table selected by index: out.row(i) = table.row(ids[i])
template <typename T>
Var<T> gather_rows(Tape<T>* tape, const Var<T>& table, std::vector<int> ids) {
  Mat<T> v(static_cast<Eigen::Index>(ids.size()), table->val.cols());
  for (size_t i = 0; i < ids.size(); ++i) v.row(static_cast<Eigen::Index>(i)) = table->val.row(ids[i]);
  if (!tape || !table->requires_grad) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [table, out, ids = std::move(ids)]() {
    if (!table->has_grad()) table->grad = Mat<T>::Zero(table->val.rows(), table->val.cols());
    for (size_t i = 0; i < ids.size(); ++i)
      table->grad.row(ids[i]) += out->grad.row(static_cast<Eigen::Index>(i));
  };
  return out;
}

template <typename T>
Var<T> concat_cols(Tape<T>* tape, const Var<T>& a, const Var<T>& b) {
  Mat<T> v(a->val.rows(), a->val.cols() + b->val.cols());
  v << a->val, b->val;
  if (!tape || !detail::any_grad<T>({&a, &b})) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, b, out]() {
    if (a->requires_grad) a->accum(out->grad.leftCols(a->val.cols()));
    if (b->requires_grad) b->accum(out->grad.rightCols(b->val.cols()));
  };
  return out;
}

template <typename T>
Var<T> slice_cols(Tape<T>* tape, const Var<T>& a, Eigen::Index start, Eigen::Index n) {
  Mat<T> v = a->val.middleCols(start, n);
  if (!tape || !a->requires_grad) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, out, start, n]() {
    if (!a->has_grad()) a->grad = Mat<T>::Zero(a->val.rows(), a->val.cols());
    a->grad.middleCols(start, n) += out->grad;
  };
  return out;
}

// 1 x n column means (length-head pooling)
template <typename T>
Var<T> mean_rows(Tape<T>* tape, const Var<T>& a) {
  Mat<T> v = a->val.colwise().mean();
  if (!tape || !a->requires_grad) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, out]() {
    T inv = T(1) / static_cast<T>(a->val.rows());
    a->accum((out->grad * inv).replicate(a->val.rows(), 1));
  };
  return out;
}

// rows scaled by a constant 0/1 (or any) per-row weight
template <typename T>
Var<T> rowscale_const(Tape<T>* tape, const Var<T>& a, const std::vector<T>& w) {
  Mat<T> v = a->val;
  for (Eigen::Index i = 0; i < v.rows(); ++i) v.row(i) *= w[static_cast<size_t>(i)];
  if (!tape || !a->requires_grad) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, out, w]() {
    Mat<T> g = out->grad;
    for (Eigen::Index i = 0; i < g.rows(); ++i) g.row(i) *= w[static_cast<size_t>(i)];
    a->accum(g);
  };
  return out;
}

// inverted dropout; masks come from the caller's rng so runs are replayable
template <typename T>
Var<T> dropout(Tape<T>* tape, const Var<T>& a, T rate, Rng& rng) {
  if (rate <= T(0)) return a;
  Mat<T> mask(a->val.rows(), a->val.cols());
  T keep = T(1) - rate;
  for (Eigen::Index i = 0; i < mask.rows(); ++i)
    for (Eigen::Index j = 0; j < mask.cols(); ++j)
      mask(i, j) = (static_cast<T>(rng.next_double()) < keep) ? T(1) / keep : T(0);
  Mat<T> v = a->val.cwiseProduct(mask);
  if (!tape || !a->requires_grad) return leaf<T>(std::move(v));
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [a, out, mask]() { a->accum(out->grad.cwiseProduct(mask)); };
  return out;
}

// Summed negative log-likelihood over included rows. Returns the raw sum;
// callers divide by their own token counts.
template <typename T>
struct MaskedNll {
  Var<T> sum;  // 1 x 1
  int count = 0;
};

template <typename T>
MaskedNll<T> nll_rows(Tape<T>* tape, const Var<T>& logits, const std::vector<int>& targets,
                      const std::vector<uint8_t>& include) {
  const Eigen::Index rows = logits->val.rows();
  if (targets.size() != static_cast<size_t>(rows) || include.size() != static_cast<size_t>(rows))
    throw std::invalid_argument("nll_rows: shape mismatch");
  Mat<T> logp = logits->val;
  for (Eigen::Index i = 0; i < rows; ++i) {
    T mx = logp.row(i).maxCoeff();
    T lse = std::log((logp.row(i).array() - mx).exp().sum()) + mx;
    logp.row(i).array() -= lse;
  }
  T total = T(0);
  int count = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!include[static_cast<size_t>(i)]) continue;
    total -= logp(i, targets[static_cast<size_t>(i)]);
    ++count;
  }
  Mat<T> v(1, 1);
  v(0, 0) = total;
  MaskedNll<T> res;
  res.count = count;
  if (!tape || !logits->requires_grad) {
    res.sum = leaf<T>(std::move(v));
    return res;
  }
  auto out = tape->record(std::move(v), true, nullptr);
  out->backprop = [logits, out, logp, targets, include]() {
    T g = out->grad(0, 0);
    Mat<T> dl = Mat<T>::Zero(logp.rows(), logp.cols());
    for (Eigen::Index i = 0; i < logp.rows(); ++i) {
      if (!include[static_cast<size_t>(i)]) continue;
      dl.row(i) = logp.row(i).array().exp().matrix() * g;
      dl(i, targets[static_cast<size_t>(i)]) -= g;
    }
    logits->accum(dl);
  };
  return res;
}

// ---- plain-matrix helpers (no gradients) ----

template <typename T>
Mat<T> log_softmax_rows(const Mat<T>& logits) {
  Mat<T> logp = logits;
  for (Eigen::Index i = 0; i < logp.rows(); ++i) {
    T mx = logp.row(i).maxCoeff();
    T lse = std::log((logp.row(i).array() - mx).exp().sum()) + mx;
    logp.row(i).array() -= lse;
  }
  return logp;
}

template <typename T>
std::vector<int> argmax_rows(const Mat<T>& m) {
  std::vector<int> out(static_cast<size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::Index j;
    m.row(i).maxCoeff(&j);
    out[static_cast<size_t>(i)] = static_cast<int>(j);
  }
  return out;
}

// fixed sinusoidal position table, rows = positions
template <typename T>
Mat<T> sinusoid_table(Eigen::Index positions, Eigen::Index dim) {
  Mat<T> pe(positions, dim);
  for (Eigen::Index p = 0; p < positions; ++p) {
    for (Eigen::Index d = 0; d < dim; ++d) {
      double exponent = static_cast<double>(2 * (d / 2)) / static_cast<double>(dim);
      double angle = static_cast<double>(p) / std::pow(10000.0, exponent);
      pe(p, d) = static_cast<T>((d % 2 == 0) ? std::sin(angle) : std::cos(angle));
    }
  }
  return pe;
}

}  // namespace lglat::nn

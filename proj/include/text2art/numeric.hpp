// Copyright 2026 The text2art Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small differentiable toolkit: layers with hand-written backward passes,
// softmax cross entropy, Adam and a finite-difference gradient checker.
// Everything is float64.

#ifndef TEXT2ART_NUMERIC_HPP
#define TEXT2ART_NUMERIC_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "text2art/error.hpp"

namespace text2art {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Seeded engine used by every stochastic routine.
using Rng = std::mt19937_64;

inline constexpr double kNormEpsilon = 1e-12;
inline constexpr double kUnitTolerance = 1e-6;

// --- linear -----------------------------------------------------------------

inline Vector linear(const Matrix& W, const Vector& b, const Vector& x) {
  if (W.cols() != x.size() || W.rows() != b.size())
    throw ArgumentError("linear: W is " + std::to_string(W.rows()) + "x" +
                        std::to_string(W.cols()) + ", b has " + std::to_string(b.size()) +
                        ", x has " + std::to_string(x.size()));
  return W * x + b;
}

/// Accumulates dL/dW and dL/db into `dW`, `db`; returns dL/dx.
inline Vector linear_backward(const Matrix& W, const Vector& x, const Vector& grad_y, Matrix& dW,
                              Vector& db) {
  if (grad_y.size() != W.rows() || x.size() != W.cols() || dW.rows() != W.rows() ||
      dW.cols() != W.cols() || db.size() != W.rows())
    throw ArgumentError("linear_backward: shape mismatch");
  dW.noalias() += grad_y * x.transpose();
  db += grad_y;
  return W.transpose() * grad_y;
}

// --- tanh -------------------------------------------------------------------

inline Vector tanh_layer(const Vector& x) { return x.array().tanh().matrix(); }

/// `y` is the forward output.
inline Vector tanh_backward(const Vector& y, const Vector& grad_y) {
  return (grad_y.array() * (1.0 - y.array().square())).matrix();
}

// --- l2 normalization -------------------------------------------------------

struct Normalized {
  Vector y;
  double norm = 0;
};

inline Normalized l2_normalize(const Vector& x) {
  const double n = x.norm();
  if (!(n > kNormEpsilon)) throw DegeneracyError("l2_normalize: input norm is ~0");
  return {x / n, n};
}

/// dL/dx = (I - y y^T) dL/dy / ||x||.
inline Vector l2_normalize_backward(const Normalized& fwd, const Vector& grad_y) {
  return (grad_y - fwd.y * fwd.y.dot(grad_y)) / fwd.norm;
}

// --- similarity and classification losses -----------------------------------

/// Cosine of two unit vectors.
inline double cosine(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw ArgumentError("cosine: dimension mismatch");
  if (std::abs(u.norm() - 1.0) > kUnitTolerance || std::abs(v.norm() - 1.0) > kUnitTolerance)
    throw ContractError("cosine: inputs must be unit vectors");
  return std::clamp(u.dot(v), -1.0, 1.0);
}

inline double cross_entropy(const Vector& logits, std::size_t cls) {
  if (cls >= static_cast<std::size_t>(logits.size()))
    throw ArgumentError("cross_entropy: class " + std::to_string(cls) + " out of range for " +
                        std::to_string(logits.size()) + " logits");
  const double mx = logits.maxCoeff();
  const double lse = mx + std::log((logits.array() - mx).exp().sum());
  return lse - logits[static_cast<Eigen::Index>(cls)];
}

/// softmax(logits) - onehot(cls).
inline Vector cross_entropy_backward(const Vector& logits, std::size_t cls) {
  if (cls >= static_cast<std::size_t>(logits.size()))
    throw ArgumentError("cross_entropy_backward: class out of range");
  Vector p = (logits.array() - logits.maxCoeff()).exp().matrix();
  p /= p.sum();
  p[static_cast<Eigen::Index>(cls)] -= 1.0;
  return p;
}

// --- Adam -------------------------------------------------------------------

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moment buffers are sized on the first step and
/// must keep matching the parameter list afterwards.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  const AdamConfig& config() const noexcept { return cfg_; }
  std::size_t step_count() const noexcept { return t_; }

  void step(std::span<const std::span<double>> params,
            std::span<const std::span<const double>> grads) {
    if (params.size() != grads.size())
      throw ArgumentError("adam: parameter and gradient lists differ in length");
    if (m_.empty()) {
      for (const auto& p : params) {
        m_.emplace_back(p.size(), 0.0);
        v_.emplace_back(p.size(), 0.0);
      }
    }
    if (m_.size() != params.size()) throw ArgumentError("adam: parameter list changed shape");
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto p = params[k];
      auto g = grads[k];
      if (p.size() != g.size() || p.size() != m_[k].size())
        throw ArgumentError("adam: parameter " + std::to_string(k) + " changed shape");
      auto& m = m_[k];
      auto& v = v_[k];
      for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
        v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
        const double mhat = m[i] / c1;
        const double vhat = v[i] / c2;
        p[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
  }

 private:
  AdamConfig cfg_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

// --- gradient checking ------------------------------------------------------

/// Largest relative disagreement between `analytic` and central differences
/// of `f` at `params`. Relative error is |a - n| / max(|a|, |n|, floor); the
/// floor keeps coordinates with ~0 gradient from dominating on round-off.
inline double grad_check(const std::function<double(std::span<const double>)>& f,
                         std::span<const double> params, std::span<const double> analytic,
                         double h = 1e-5, double floor = 1e-6) {
  if (params.size() != analytic.size())
    throw ArgumentError("grad_check: gradient length differs from parameter length");
  std::vector<double> p(params.begin(), params.end());
  double worst = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + h;
    const double fp = f(p);
    p[i] = saved - h;
    const double fm = f(p);
    p[i] = saved;
    const double numeric = (fp - fm) / (2 * h);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), floor});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
  }
  return worst;
}

// --- helpers ----------------------------------------------------------------

inline std::span<double> as_span(Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
inline std::span<double> as_span(Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<const double> as_span(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Uniform(-bound, bound) fill.
template <typename Derived>
void fill_uniform(Eigen::MatrixBase<Derived>& m, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = dist(rng);
}

inline Vector to_vector(std::span<const double> values) {
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace text2art

#endif  // TEXT2ART_NUMERIC_HPP

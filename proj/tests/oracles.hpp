#pragma once

// Independent reference implementations used by the tests. Nothing here calls
// into the library's numeric kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ecc/layers.hpp"
#include "ecc/metrics.hpp"
#include "ecc/models.hpp"

namespace oracle {

inline double clamp_prob(double p) { return std::clamp(p, 1e-12, 1.0 - 1e-12); }

// Scalar-loop forward pass of a sequential layer stack on one input row,
// accumulated in T.
template <class T = double>
std::vector<T> forward_row(const ecc::Layers& layers, std::vector<T> x) {
  auto act = [](ecc::Activation a, T v) { return a == ecc::Activation::kRelu ? std::max(T(0), v) : v; };
  auto dense = [](const ecc::Tensor& w, const ecc::Tensor& b, const std::vector<T>& in) {
    const std::size_t out = w.shape()[0], n = w.shape()[1];
    std::vector<T> y(out);
    for (std::size_t o = 0; o < out; ++o) {
      T s = 0;
      for (std::size_t i = 0; i < n; ++i) s += static_cast<T>(w[o * n + i]) * in[i];
      y[o] = s + static_cast<T>(b[o]);
    }
    return y;
  };
  for (const auto& l : layers) {
    if (l.kind == ecc::LayerKind::kDense) {
      auto y = dense(l.params[0], l.params[1], x);
      for (auto& v : y) v = act(l.activation, v);
      x = std::move(y);
    } else {
      auto h = dense(l.params[0], l.params[1], x);
      for (auto& v : h) v = std::max(T(0), v);
      auto r = dense(l.params[2], l.params[3], h);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = act(l.activation, x[i] + r[i]);
    }
  }
  return x;
}

// Softmax in long double.
inline std::vector<long double> softmax_ld(const std::vector<double>& z) {
  long double m = *std::max_element(z.begin(), z.end());
  std::vector<long double> p(z.size());
  long double s = 0.0L;
  for (std::size_t i = 0; i < z.size(); ++i) s += (p[i] = std::exp(static_cast<long double>(z[i]) - m));
  for (auto& v : p) v /= s;
  return p;
}

// Mean softmax cross-entropy of the stack over a batch.
inline double batch_ce(const ecc::Layers& layers, const ecc::Tensor& x, const std::vector<std::size_t>& labels) {
  double total = 0.0;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    auto row = x.row(r);
    auto z = forward_row(layers, std::vector<double>(row.begin(), row.end()));
    auto p = softmax_ld(z);
    total += -std::log(clamp_prob(static_cast<double>(p[labels[r]])));
  }
  return total / static_cast<double>(labels.size());
}

// batch_ce with the whole forward pass in long double, for finite
// differences on small partials.
inline long double batch_ce_ld(const ecc::Layers& layers, const ecc::Tensor& x, const std::vector<std::size_t>& labels) {
  long double total = 0.0L;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    auto row = x.row(r);
    auto z = forward_row<long double>(layers, std::vector<long double>(row.begin(), row.end()));
    long double m = *std::max_element(z.begin(), z.end()), s = 0.0L;
    for (auto v : z) s += std::exp(v - m);
    const long double p = std::exp(z[labels[r]] - m) / s;
    total += -std::log(std::clamp(p, 1e-12L, 1.0L - 1e-12L));
  }
  return total / static_cast<long double>(labels.size());
}

inline double bce(double target_logit, double pred_logit) {
  const double p = 1.0 / (1.0 + std::exp(-target_logit));
  const double q = clamp_prob(1.0 / (1.0 + std::exp(-pred_logit)));
  return -(p * std::log(q) + (1.0 - p) * std::log(1.0 - q));
}

inline double rel_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

// Random stack of depth 1..4 and widths 1..16 mixing dense and residual layers.
inline ecc::Layers random_net(std::mt19937_64& rng, std::size_t in, std::size_t out) {
  std::uniform_int_distribution<std::size_t> depth(1, 4), width(1, 16), coin(0, 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ecc::Layers layers;
  const std::size_t d = depth(rng);
  std::size_t cur = in;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    if (coin(rng) == 1 && !layers.empty()) {
      layers.push_back(ecc::LayerSpec::residual(cur, coin(rng) ? ecc::Activation::kRelu : ecc::Activation::kIdentity));
    } else {
      const std::size_t w = width(rng);
      layers.push_back(ecc::LayerSpec::dense(cur, w, ecc::Activation::kRelu));
      cur = w;
    }
  }
  layers.push_back(ecc::LayerSpec::dense(cur, out, ecc::Activation::kIdentity));
  for (auto& l : layers) {
    for (auto& p : l.params) {
      for (auto& v : p.values()) v = u(rng);
    }
  }
  return layers;
}

// O(n^2) non-dominated filter with first-occurrence deduplication.
inline std::vector<std::size_t> brute_force_frontier(const std::vector<ecc::ParetoPoint>& pts) {
  auto better_eq = [](const ecc::ParetoPoint& a, const ecc::ParetoPoint& b, std::size_t k) {
    return a.senses[k] == ecc::Sense::kMaximize ? a.objectives[k] >= b.objectives[k] : a.objectives[k] <= b.objectives[k];
  };
  auto dom = [&](const ecc::ParetoPoint& a, const ecc::ParetoPoint& b) {
    bool strict = false;
    for (std::size_t k = 0; k < a.objectives.size(); ++k) {
      if (!better_eq(a, b, k)) return false;
      if (a.objectives[k] != b.objectives[k]) strict = true;
    }
    return strict;
  };
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false, duplicate = false;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i && dom(pts[j], pts[i])) dominated = true;
      if (j < i && pts[j].objectives == pts[i].objectives) duplicate = true;
    }
    if (!dominated && !duplicate) keep.push_back(i);
  }
  return keep;
}

}  // namespace oracle

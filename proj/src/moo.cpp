#include "ecc/moo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecc/errors.hpp"

namespace ecc::moo {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

std::vector<double> combine(const GradientBundle& bundle, std::span<const double> alpha) {
  std::vector<double> out(bundle.dim(), 0.0);
  for (std::size_t i = 0; i < bundle.count(); ++i) {
    if (alpha[i] == 0.0) continue;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += alpha[i] * bundle.grads[i][k];
  }
  return out;
}

void GradientBundle::validate() const {
  if (grads.size() < 2) throw UsageError("gradient bundle needs at least two objectives");
  for (const auto& g : grads) {
    if (g.size() != grads.front().size()) throw UsageError("gradient bundle: dimension mismatch");
    for (double v : g) {
      if (!std::isfinite(v)) throw UsageError("gradient bundle: non-finite entry");
    }
  }
}

namespace {

MinNormResult finish(const GradientBundle& bundle, std::vector<double> alpha, std::size_t iterations) {
  MinNormResult r;
  r.combined = combine(bundle, alpha);
  r.squared_norm = dot(r.combined, r.combined);
  r.alpha = std::move(alpha);
  r.iterations = iterations;
  return r;
}

// α for g1 in min ||α g1 + (1-α) g2||².
double two_point_weight(double g11, double g12, double g22) {
  const double denom = g11 - 2.0 * g12 + g22;  // ||g1 - g2||²
  if (denom <= 0.0) return 0.5;
  return std::clamp((g22 - g12) / denom, 0.0, 1.0);
}

MinNormResult frank_wolfe(const GradientBundle& bundle, double tol) {
  const std::size_t p = bundle.count();
  std::vector<std::vector<double>> gram(p, std::vector<double>(p));
  double max_norm = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) gram[i][j] = gram[j][i] = dot(bundle.grads[i], bundle.grads[j]);
    max_norm = std::max(max_norm, gram[i][i]);
  }
  const double threshold = tol * std::max(1.0, max_norm);

  // Start at the shortest vertex.
  std::vector<double> alpha(p, 0.0);
  std::size_t start = 0;
  for (std::size_t i = 1; i < p; ++i) {
    if (gram[i][i] < gram[start][start]) start = i;
  }
  alpha[start] = 1.0;

  // m[i] = <g_i, v>, vv = <v, v> with v = Σ α g; both maintained from the Gram matrix.
  std::vector<double> m(p);
  auto refresh = [&] {
    for (std::size_t i = 0; i < p; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) acc += gram[i][j] * alpha[j];
      m[i] = acc;
    }
  };
  refresh();

  std::size_t it = 0;
  for (; it < kMaxIterations; ++it) {
    double vv = 0.0;
    for (std::size_t i = 0; i < p; ++i) vv += alpha[i] * m[i];
    const auto toward = static_cast<std::size_t>(std::min_element(m.begin(), m.end()) - m.begin());
    const double gap = vv - m[toward];
    if (gap <= threshold) break;

    // Away vertex: the active atom with the largest <g_i, v>.
    std::size_t away = toward;
    for (std::size_t i = 0; i < p; ++i) {
      if (alpha[i] > 0.0 && (away == toward || m[i] > m[away])) away = i;
    }
    const double away_gap = m[away] - vv;

    if (gap >= away_gap || away == toward) {
      // Move toward vertex t: v' = v + γ (g_t - v).
      const double dd = gram[toward][toward] - 2.0 * m[toward] + vv;
      const double gamma = dd > 0.0 ? std::clamp((vv - m[toward]) / dd, 0.0, 1.0) : 1.0;
      for (auto& a : alpha) a *= (1.0 - gamma);
      alpha[toward] += gamma;
    } else {
      // Move away from vertex a: v' = v + γ (v - g_a), γ ≤ α_a / (1 - α_a).
      const double max_gamma = alpha[away] < 1.0 ? alpha[away] / (1.0 - alpha[away])
                                                 : std::numeric_limits<double>::infinity();
      const double dd = gram[away][away] - 2.0 * m[away] + vv;
      double gamma = dd > 0.0 ? (m[away] - vv) / dd : max_gamma;
      gamma = std::clamp(gamma, 0.0, max_gamma);
      for (auto& a : alpha) a *= (1.0 + gamma);
      alpha[away] -= gamma;
      if (gamma == max_gamma) alpha[away] = 0.0;
    }
    double sum = 0.0;
    for (auto& a : alpha) {
      a = std::max(a, 0.0);
      sum += a;
    }
    for (auto& a : alpha) a /= sum;
    refresh();
  }
  return finish(bundle, std::move(alpha), it);
}

}  // namespace

MinNormResult solve_min_norm(const GradientBundle& bundle, double tol) {
  bundle.validate();
  if (!(tol > 0.0)) throw UsageError("solve_min_norm: tolerance must be positive");
  const std::size_t p = bundle.count();

  bool all_zero = true;
  for (const auto& g : bundle.grads) {
    all_zero = all_zero && std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; });
  }
  if (all_zero) return finish(bundle, std::vector<double>(p, 1.0 / static_cast<double>(p)), 0);

  if (p == 2) {
    const auto& g1 = bundle.grads[0];
    const auto& g2 = bundle.grads[1];
    const double a = two_point_weight(dot(g1, g1), dot(g1, g2), dot(g2, g2));
    return finish(bundle, {a, 1.0 - a}, 0);
  }
  return frank_wolfe(bundle, tol);
}

GridResult grid_oracle(const GradientBundle& bundle, double step) {
  bundle.validate();
  const std::size_t p = bundle.count();
  if (p > 3) throw UsageError("grid_oracle: only p = 2 or 3 objectives are supported");
  if (!(step > 0.0) || step > 1e-2) throw UsageError("grid_oracle: step must be in (0, 1e-2]");
  const auto n = static_cast<std::size_t>(std::llround(1.0 / step));

  GridResult best{{}, std::numeric_limits<double>::infinity()};
  std::vector<double> alpha(p);
  auto consider = [&] {
    const auto v = combine(bundle, alpha);
    const double norm = dot(v, v);
    if (norm < best.squared_norm) best = {alpha, norm};
  };
  const double inv = 1.0 / static_cast<double>(n);
  if (p == 2) {
    for (std::size_t i = 0; i <= n; ++i) {
      alpha = {static_cast<double>(i) * inv, static_cast<double>(n - i) * inv};
      consider();
    }
  } else {
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; i + j <= n; ++j) {
        alpha = {static_cast<double>(i) * inv, static_cast<double>(j) * inv, static_cast<double>(n - i - j) * inv};
        consider();
      }
    }
  }
  return best;
}

DescentCheck check_descent(const GradientBundle& bundle, std::span<const double> combined) {
  bundle.validate();
  if (combined.size() != bundle.dim()) throw UsageError("check_descent: combined direction has wrong dimension");
  DescentCheck out{true, {}};
  for (const auto& g : bundle.grads) {
    const double ip = dot(combined, g);
    out.inner_products.push_back(ip);
    if (ip < -kDescentSlack) out.ok = false;
  }
  return out;
}

}  // namespace ecc::moo

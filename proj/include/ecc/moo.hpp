#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ecc::moo {

// p objective gradients of a common dimension d.
struct GradientBundle {
  std::vector<std::vector<double>> grads;

  std::size_t count() const { return grads.size(); }
  std::size_t dim() const { return grads.empty() ? 0 : grads.front().size(); }
  // Throws UsageError for p < 2, ragged dimensions or non-finite entries.
  void validate() const;
};

struct MinNormResult {
  std::vector<double> alpha;     // point on the probability simplex
  std::vector<double> combined;  // Σ alpha_i g_i
  double squared_norm = 0.0;
  std::size_t iterations = 0;    // 0 for the closed form
};

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr std::size_t kMaxIterations = 10000;
inline constexpr double kDescentSlack = 1e-9;

// Minimum-norm point of the convex hull of the bundle. Two gradients use the
// closed form; three or more run Frank-Wolfe (with away steps) until the
// duality gap drops below tol * max(1, max_i ||g_i||^2).
MinNormResult solve_min_norm(const GradientBundle& bundle, double tol = kDefaultTolerance);

struct GridResult {
  std::vector<double> alpha;
  double squared_norm = 0.0;
};

// Exhaustive search over the simplex lattice with spacing `step`; p in {2, 3}.
GridResult grid_oracle(const GradientBundle& bundle, double step);

struct DescentCheck {
  bool ok = false;
  std::vector<double> inner_products;  // <combined, g_j>
};

// True iff <combined, g_j> >= -kDescentSlack for every objective j.
DescentCheck check_descent(const GradientBundle& bundle, std::span<const double> combined);

double dot(std::span<const double> a, std::span<const double> b);
std::vector<double> combine(const GradientBundle& bundle, std::span<const double> alpha);

}  // namespace ecc::moo

#include "ecc/losses.hpp"

#include <algorithm>
#include <cmath>

#include "ecc/errors.hpp"
#include "ecc/tape.hpp"

namespace ecc {

namespace {

double masked_ce(const Tensor& probs, std::span<const std::size_t> labels, std::size_t skip_label, bool use_skip,
                 std::size_t& count) {
  const Tensor p = probs.as_batch();
  if (p.rows() != labels.size()) throw UsageError("cross_entropy: one label per row required");
  double total = 0.0;
  count = 0;
  for (std::size_t r = 0; r < p.rows(); ++r) {
    if (use_skip && labels[r] == skip_label) continue;
    if (labels[r] >= p.cols()) throw UsageError("cross_entropy: label out of range");
    total -= std::log(std::clamp(p.at(r, labels[r]), kProbEpsilon, 1.0 - kProbEpsilon));
    ++count;
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

}  // namespace

double cross_entropy(const Tensor& probs, std::span<const std::size_t> labels) {
  if (labels.empty()) throw UsageError("cross_entropy: empty batch");
  std::size_t count = 0;
  return masked_ce(probs, labels, 0, false, count);
}

double kd_loss(const FeatureMap& cloud_feature, const FeatureMap& adapted_feature) {
  const Tensor& t = cloud_feature.values;
  const Tensor& a = adapted_feature.values;
  if (t.shape() != a.shape()) {
    throw UsageError("kd_loss: shape mismatch " + shape_string(t.shape()) + " vs " + shape_string(a.shape()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double p = sigmoid(t[i]);
    const double q = std::clamp(sigmoid(a[i]), kProbEpsilon, 1.0 - kProbEpsilon);
    total -= p * std::log(q) + (1.0 - p) * std::log(1.0 - q);
  }
  return total / static_cast<double>(t.size());
}

PositiveLoss positive_cross_entropy(const Tensor& probs, std::span<const std::size_t> labels,
                                    std::size_t normal_class) {
  if (labels.empty()) throw UsageError("positive_cross_entropy: empty batch");
  std::size_t count = 0;
  const double v = masked_ce(probs, labels, normal_class, true, count);
  return {v, count > 0};
}

}  // namespace ecc

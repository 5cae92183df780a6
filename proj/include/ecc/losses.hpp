#pragma once

#include <cstddef>
#include <span>

#include "ecc/models.hpp"
#include "ecc/tensor.hpp"

namespace ecc {

// Mean of -log p[label] over the batch, p clamped to [1e-12, 1 - 1e-12].
double cross_entropy(const Tensor& probs, std::span<const std::size_t> labels);

// Mean elementwise BCE between p = σ(cloud) and q = clamp(σ(adapted)).
double kd_loss(const FeatureMap& cloud_feature, const FeatureMap& adapted_feature);

struct PositiveLoss {
  double value = 0.0;
  // False when the batch holds no positive rows; value is then 0.
  bool has_positives = false;
};

// Cross-entropy restricted to rows whose label is not the normal class.
PositiveLoss positive_cross_entropy(const Tensor& probs, std::span<const std::size_t> labels,
                                    std::size_t normal_class);

}  // namespace ecc

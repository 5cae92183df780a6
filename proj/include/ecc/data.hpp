#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecc/tensor.hpp"

namespace ecc {

// Features (n, d) with one class label per row.
struct Split {
  Tensor features;
  std::vector<std::size_t> labels;

  std::size_t size() const { return labels.size(); }
  void validate(std::size_t num_classes) const;
  Split subset(std::span<const std::size_t> rows) const;
};

struct ClassificationMetrics {
  double accuracy = 0.0;
  // Positives (label != normal) predicted as any non-normal class. 1 when
  // there are no positives.
  double recall = 1.0;
};

ClassificationMetrics classification_metrics(std::span<const std::size_t> predictions,
                                             std::span<const std::size_t> labels, std::size_t normal_class);
ClassificationMetrics classification_metrics(const Tensor& probs, std::span<const std::size_t> labels,
                                             std::size_t normal_class);

}  // namespace ecc

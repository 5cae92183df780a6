#include "ecc/data.hpp"

#include "ecc/errors.hpp"
#include "ecc/models.hpp"

namespace ecc {

void Split::validate(std::size_t num_classes) const {
  if (labels.empty()) throw UsageError("split is empty");
  if (features.rank() != 2 || features.rows() != labels.size()) {
    throw UsageError("split: features must be (n, d) with one label per row");
  }
  for (auto l : labels) {
    if (l >= num_classes) throw UsageError("split: label " + std::to_string(l) + " out of range");
  }
}

Split Split::subset(std::span<const std::size_t> rows) const {
  Split out{features.gather_rows(rows), {}};
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(labels[r]);
  return out;
}

ClassificationMetrics classification_metrics(std::span<const std::size_t> predictions,
                                             std::span<const std::size_t> labels, std::size_t normal_class) {
  if (predictions.size() != labels.size() || labels.empty()) throw UsageError("metrics: need one prediction per label");
  std::size_t correct = 0, positives = 0, caught = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    correct += predictions[i] == labels[i] ? 1 : 0;
    if (labels[i] != normal_class) {
      ++positives;
      caught += predictions[i] != normal_class ? 1 : 0;
    }
  }
  ClassificationMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
  m.recall = positives ? static_cast<double>(caught) / static_cast<double>(positives) : 1.0;
  return m;
}

ClassificationMetrics classification_metrics(const Tensor& probs, std::span<const std::size_t> labels,
                                             std::size_t normal_class) {
  const Tensor p = probs.as_batch();
  std::vector<std::size_t> pred(p.rows());
  for (std::size_t r = 0; r < p.rows(); ++r) pred[r] = argmax(p.row(r));
  return classification_metrics(pred, labels, normal_class);
}

}  // namespace ecc

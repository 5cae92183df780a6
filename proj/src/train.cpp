#include "ecc/train.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>

#include "ecc/errors.hpp"
#include "ecc/losses.hpp"
#include "ecc/moo.hpp"
#include "ecc/tape.hpp"

namespace ecc {

std::string_view to_string(TrainStage stage) {
  switch (stage) {
    case TrainStage::kBase: return "base";
    case TrainStage::kKdEdge: return "kd-edge";
    case TrainStage::kAdapterFinetune: return "adapter-finetune";
    case TrainStage::kRecallBoost: return "recall-boost";
  }
  return "unknown";
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("train: epochs must be non-negative");
  if (batch_size == 0) throw ConfigError("train: batch_size must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("train: learning_rate must be >= 0");
  if (!(kd_weight >= 0.0) || !std::isfinite(kd_weight)) throw ConfigError("train: kd_weight must be >= 0");
}

namespace {

constexpr std::string_view kEdge = "edge";
constexpr std::string_view kCloud = "cloud";
constexpr std::string_view kAdapter = "adapter";

// Runs `epochs` passes over shuffled minibatches. `step` receives the row
// indices of one batch and returns the scalar loss that was minimised.
void run_epochs(const TrainConfig& config, std::size_t n, TrainStage stage,
                const std::function<double(std::span<const std::size_t>)>& step,
                const std::function<void(int)>& end_of_epoch) {
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, n - begin);
      const double loss = step(std::span<const std::size_t>(order).subspan(begin, count));
      if (!std::isfinite(loss)) throw DivergenceError(std::string(to_string(stage)), epoch);
    }
    end_of_epoch(epoch);
  }
}

std::vector<char> positive_mask(std::span<const std::size_t> labels, std::size_t normal_class) {
  std::vector<char> mask(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) mask[i] = labels[i] != normal_class ? 1 : 0;
  return mask;
}

std::vector<std::size_t> gather(std::span<const std::size_t> values, std::span<const std::size_t> rows) {
  std::vector<std::size_t> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(values[r]);
  return out;
}

LossReport summarize(int epoch, const Tensor& probs, const Split& data, std::size_t normal_class) {
  LossReport r;
  r.epoch = epoch;
  r.ce_loss = cross_entropy(probs, data.labels);
  const auto pos = positive_cross_entropy(probs, data.labels, normal_class);
  r.positive_ce_loss = pos.value;
  r.has_positives = pos.has_positives;
  const auto m = classification_metrics(probs, data.labels, normal_class);
  r.accuracy = m.accuracy;
  r.recall = m.recall;
  return r;
}

void check_report(const LossReport& r, TrainStage stage) {
  if (!std::isfinite(r.ce_loss) || !std::isfinite(r.kd_loss) || !std::isfinite(r.positive_ce_loss)) {
    throw DivergenceError(std::string(to_string(stage)), r.epoch);
  }
}

// Flat parameter layout for gradient bundles: one entry per named parameter.
struct Layout {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> entries;
  std::size_t total = 0;

  void add(std::span<const LayerSpec> layers, std::size_t first_index, std::string_view prefix) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      for (std::size_t k = 0; k < layers[i].params.size(); ++k) {
        entries.emplace_back(param_name(prefix, first_index + i, k), layers[i].params[k].shape());
        total += layers[i].params[k].size();
      }
    }
  }

  std::vector<double> flatten(const Gradients& g) const {
    std::vector<double> out(total, 0.0);
    std::size_t offset = 0;
    for (const auto& [name, shape] : entries) {
      const std::size_t n = shape_size(shape);
      if (auto it = g.find(name); it != g.end()) {
        std::copy(it->second.values().begin(), it->second.values().end(), out.begin() + offset);
      }
      offset += n;
    }
    return out;
  }

  Gradients unflatten(std::span<const double> flat) const {
    Gradients g;
    std::size_t offset = 0;
    for (const auto& [name, shape] : entries) {
      const std::size_t n = shape_size(shape);
      g.emplace(name, Tensor(shape, std::vector<double>(flat.begin() + offset, flat.begin() + offset + n)));
      offset += n;
    }
    return g;
  }
};

// Min-norm combination of per-objective gradients; returns the step taken.
MooStep moo_direction(const Layout& layout, const std::vector<Gradients>& per_objective, Gradients& direction) {
  moo::GradientBundle bundle;
  for (const auto& g : per_objective) bundle.grads.push_back(layout.flatten(g));
  const auto sol = moo::solve_min_norm(bundle);
  MooStep step;
  step.alpha = sol.alpha;
  step.inner_products = moo::check_descent(bundle, sol.combined).inner_products;
  step.skipped = std::all_of(sol.combined.begin(), sol.combined.end(), [](double v) { return v == 0.0; });
  if (!step.skipped) direction = layout.unflatten(sol.combined);
  return step;
}

std::vector<double> mean_alpha(std::span<const MooStep> steps) {
  if (steps.empty()) return {};
  std::vector<double> out(steps.front().alpha.size(), 0.0);
  for (const auto& s : steps) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s.alpha[i];
  }
  for (auto& v : out) v /= static_cast<double>(steps.size());
  return out;
}

void require_positive_and_normal(const Split& data, std::size_t normal_class) {
  bool normal = false, positive = false;
  for (auto l : data.labels) {
    (l == normal_class ? normal : positive) = true;
  }
  if (!normal || !positive) throw UsageError("recall boosting needs both normal and positive samples");
}

}  // namespace

TrainedModel train_base(ModelSpec model, const Split& data, const TrainConfig& config) {
  config.validate();
  model.validate();
  data.validate(model.num_classes);
  TrainedModel out;
  auto report = [&](int epoch) {
    out.history.push_back(summarize(epoch, infer(model, data.features), data, model.normal_class));
    check_report(out.history.back(), config.stage);
  };
  report(0);
  run_epochs(
      config, data.size(), config.stage,
      [&](std::span<const std::size_t> rows) {
        GradientTape tape;
        auto x = tape.constant(data.features.gather_rows(rows));
        auto logits = record_layers(tape, model.layers, 0, x, kEdge, true);
        auto loss = tape.softmax_cross_entropy(logits, gather(data.labels, rows), std::vector<char>(rows.size(), 1));
        apply_sgd(model.layers, 0, kEdge, backward(tape), config.learning_rate);
        return tape.value(loss)[0];
      },
      report);
  out.model = std::move(model);
  return out;
}

TrainedEdgeKd train_edge_kd(ModelSpec edge, const ModelSpec& cloud, AdapterSpec adapter, const Split& data,
                            const TrainConfig& config, KdOptions options) {
  config.validate();
  edge.validate();
  cloud.validate();
  adapter.validate_against(edge, cloud);
  data.validate(edge.num_classes);
  if (options.recall_boost) require_positive_and_normal(data, edge.normal_class);

  const std::uint64_t cloud_hash = parameter_hash(cloud.layers);
  const std::size_t m = adapter.edge_tap;
  std::span<const LayerSpec> cloud_head(cloud.layers.data(), adapter.cloud_tap + 1);
  const Tensor cloud_features = forward(cloud_head, data.features);

  TrainedEdgeKd out;
  std::vector<MooStep> epoch_steps;
  auto report = [&](int epoch) {
    const auto tap = infer_with_tap(edge, data.features, m);
    LossReport r = summarize(epoch, tap.probs, data, edge.normal_class);
    r.kd_loss = kd_loss(FeatureMap{cloud_features, cloud.name, adapter.cloud_tap}, adapt(adapter, tap.feature));
    r.mean_alpha = mean_alpha(epoch_steps);
    epoch_steps.clear();
    check_report(r, config.stage);
    out.history.push_back(std::move(r));
  };
  report(0);

  Layout layout;
  if (options.recall_boost) {
    if (!options.freeze_edge) layout.add(edge.layers, 0, kEdge);
    layout.add(adapter.layers, 0, kAdapter);
  }
  std::span<const LayerSpec> edge_all(edge.layers);

  run_epochs(
      config, data.size(), config.stage,
      [&](std::span<const std::size_t> rows) {
        GradientTape tape;
        const bool train_edge = !options.freeze_edge;
        auto x = tape.constant(data.features.gather_rows(rows));
        auto h = record_layers(tape, edge_all.first(m + 1), 0, x, kEdge, train_edge);
        auto logits = record_layers(tape, edge_all.subspan(m + 1), m + 1, h, kEdge, train_edge);
        const auto labels = gather(data.labels, rows);
        auto ce = tape.softmax_cross_entropy(logits, labels, std::vector<char>(rows.size(), 1));
        auto adapted = record_layers(tape, adapter.layers, 0, h, kAdapter, true);
        auto target = tape.constant(cloud_features.gather_rows(rows));
        auto kd = tape.sigmoid_bce(target, adapted);

        Gradients grads;
        double loss;
        if (options.recall_boost) {
          auto pos = tape.softmax_cross_entropy(logits, labels, positive_mask(labels, edge.normal_class));
          auto kd_scaled = tape.scale(kd, config.kd_weight);
          std::vector<Gradients> per{backward(tape, ce), backward(tape, pos), backward(tape, kd_scaled)};
          MooStep s = moo_direction(layout, per, grads);
          loss = tape.value(ce)[0] + tape.value(pos)[0] + tape.value(kd_scaled)[0];
          out.steps.push_back(s);
          epoch_steps.push_back(std::move(s));
        } else {
          const std::array<GradientTape::Node, 2> terms{ce, kd};
          const std::array<double, 2> weights{1.0, config.kd_weight};
          auto total = tape.weighted_sum(terms, weights);
          grads = backward(tape, total);
          loss = tape.value(total)[0];
        }
        if (train_edge) apply_sgd(edge.layers, 0, kEdge, grads, config.learning_rate);
        apply_sgd(adapter.layers, 0, kAdapter, grads, config.learning_rate);
        return loss;
      },
      report);

  if (parameter_hash(cloud.layers) != cloud_hash) throw InvariantError("train_edge_kd: frozen cloud parameters changed");
  out.edge = std::move(edge);
  out.adapter = std::move(adapter);
  return out;
}

TunedAdapter finetune_adapter(const ModelSpec& edge, ModelSpec cloud, AdapterSpec adapter, const Split& data,
                              const TrainConfig& config) {
  config.validate();
  edge.validate();
  cloud.validate();
  adapter.validate_against(edge, cloud);
  data.validate(cloud.num_classes);

  const std::size_t n = adapter.cloud_tap;
  std::span<LayerSpec> cloud_all(cloud.layers);
  const std::uint64_t edge_hash = parameter_hash(edge.layers);
  const std::uint64_t frozen_hash = parameter_hash(cloud_all.first(n + 1));

  const FeatureMap edge_features = infer_with_tap(edge, data.features, adapter.edge_tap).feature;
  const Tensor cloud_features = forward(cloud_all.first(n + 1), data.features);

  TunedAdapter out;
  auto report = [&](int epoch) {
    const FeatureMap adapted = adapt(adapter, edge_features);
    LossReport r = summarize(epoch, cloud_tail(cloud, adapted, n), data, cloud.normal_class);
    r.kd_loss = kd_loss(FeatureMap{cloud_features, cloud.name, n}, adapted);
    check_report(r, config.stage);
    out.history.push_back(std::move(r));
  };
  report(0);

  run_epochs(
      config, data.size(), config.stage,
      [&](std::span<const std::size_t> rows) {
        GradientTape tape;
        auto x = tape.constant(edge_features.values.gather_rows(rows));
        auto a = record_layers(tape, adapter.layers, 0, x, kAdapter, true);
        auto logits = record_layers(tape, cloud_all.subspan(n + 1), n + 1, a, kCloud, true);
        auto loss = tape.softmax_cross_entropy(logits, gather(data.labels, rows), std::vector<char>(rows.size(), 1));
        const auto grads = backward(tape);
        apply_sgd(adapter.layers, 0, kAdapter, grads, config.learning_rate);
        apply_sgd(cloud_all.subspan(n + 1), n + 1, kCloud, grads, config.learning_rate);
        return tape.value(loss)[0];
      },
      report);

  if (parameter_hash(cloud_all.first(n + 1)) != frozen_hash || parameter_hash(edge.layers) != edge_hash) {
    throw InvariantError("finetune_adapter: frozen parameters changed");
  }
  out.adapter = std::move(adapter);
  out.cloud = std::move(cloud);
  return out;
}

RecallBoosted train_recall_boost(ModelSpec edge, const Split& data, const TrainConfig& config) {
  config.validate();
  edge.validate();
  data.validate(edge.num_classes);
  require_positive_and_normal(data, edge.normal_class);

  RecallBoosted out;
  std::vector<MooStep> epoch_steps;
  auto report = [&](int epoch) {
    LossReport r = summarize(epoch, infer(edge, data.features), data, edge.normal_class);
    r.mean_alpha = mean_alpha(epoch_steps);
    epoch_steps.clear();
    check_report(r, config.stage);
    out.history.push_back(std::move(r));
  };
  report(0);

  Layout layout;
  layout.add(edge.layers, 0, kEdge);
  run_epochs(
      config, data.size(), config.stage,
      [&](std::span<const std::size_t> rows) {
        GradientTape tape;
        auto x = tape.constant(data.features.gather_rows(rows));
        auto logits = record_layers(tape, edge.layers, 0, x, kEdge, true);
        const auto labels = gather(data.labels, rows);
        auto ce = tape.softmax_cross_entropy(logits, labels, std::vector<char>(rows.size(), 1));
        auto pos = tape.softmax_cross_entropy(logits, labels, positive_mask(labels, edge.normal_class));
        Gradients direction;
        MooStep s = moo_direction(layout, {backward(tape, ce), backward(tape, pos)}, direction);
        if (!s.skipped) apply_sgd(edge.layers, 0, kEdge, direction, config.learning_rate);
        out.steps.push_back(s);
        epoch_steps.push_back(std::move(s));
        return tape.value(ce)[0] + tape.value(pos)[0];
      },
      report);
  out.edge = std::move(edge);
  return out;
}

void write_training_log(std::ostream& os, const std::vector<LossReport>& history) {
  os << "epoch,ce,kd,positive_ce,accuracy,recall,alpha_ce,alpha_positive,alpha_kd\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  for (const auto& r : history) {
    os << r.epoch << ',' << num(r.ce_loss) << ',' << num(r.kd_loss) << ',' << num(r.positive_ce_loss) << ','
       << num(r.accuracy) << ',' << num(r.recall);
    for (std::size_t i = 0; i < 3; ++i) {
      os << ',';
      if (i < r.mean_alpha.size()) os << num(r.mean_alpha[i]);
    }
    os << '\n';
  }
}

}  // namespace ecc

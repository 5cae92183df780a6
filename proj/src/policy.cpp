#include "ecc/policy.hpp"

#include "ecc/errors.hpp"

namespace ecc {

std::string_view to_string(PolicyVariant v) {
  switch (v) {
    case PolicyVariant::kIndependent: return "independent";
    case PolicyVariant::kAdaptive: return "adaptive";
    case PolicyVariant::kDynamic: return "dynamic";
  }
  return "unknown";
}

PolicyVariant parse_policy_variant(std::string_view text) {
  if (text == "independent") return PolicyVariant::kIndependent;
  if (text == "adaptive") return PolicyVariant::kAdaptive;
  if (text == "dynamic") return PolicyVariant::kDynamic;
  throw ConfigError("unknown policy variant '" + std::string(text) + "'");
}

std::string_view to_string(Route r) {
  switch (r) {
    case Route::kEdgeOnly: return "edge-only";
    case Route::kAdaptive: return "adaptive";
    case Route::kFullCloud: return "full-cloud";
  }
  return "unknown";
}

EccPolicy EccPolicy::independent(double c1) {
  EccPolicy p;
  p.variant = PolicyVariant::kIndependent;
  p.c1 = c1;
  return p;
}

EccPolicy EccPolicy::adaptive(double c1) {
  EccPolicy p;
  p.variant = PolicyVariant::kAdaptive;
  p.c1 = c1;
  return p;
}

EccPolicy EccPolicy::dynamic(double c1, double c2) {
  EccPolicy p;
  p.variant = PolicyVariant::kDynamic;
  p.c1 = c1;
  p.c2 = c2;
  return p;
}

void EccPolicy::validate() const {
  if (!(c1 >= 0.0 && c1 <= 1.0)) throw ConfigError("policy: c1 must lie in [0, 1]");
  if (variant == PolicyVariant::kDynamic && !(c2 >= 0.0 && c2 <= c1)) {
    throw ConfigError("policy: dynamic thresholds need 0 <= c2 <= c1");
  }
  if (bytes_per_element == 0) throw ConfigError("policy: bytes_per_element must be positive");
}

void EccModels::validate() const {
  edge.validate();
  cloud.validate();
  adaptive_cloud.validate();
  adapter.validate_against(edge, adaptive_cloud);
  if (edge.num_classes != cloud.num_classes || edge.normal_class != cloud.normal_class) {
    throw ConfigError("edge and cloud disagree on classes");
  }
  if (edge.input_dim() != cloud.input_dim()) throw ConfigError("edge and cloud disagree on input width");
}

Route decide_route(const EccPolicy& policy, double c) {
  if (c >= policy.c1) return Route::kEdgeOnly;
  switch (policy.variant) {
    case PolicyVariant::kIndependent: return Route::kFullCloud;
    case PolicyVariant::kAdaptive: return Route::kAdaptive;
    case PolicyVariant::kDynamic: return c >= policy.c2 ? Route::kAdaptive : Route::kFullCloud;
  }
  return Route::kFullCloud;
}

std::uint64_t adaptive_cloud_flops(const EccModels& models) {
  std::span<const LayerSpec> layers(models.adaptive_cloud.layers);
  return flops(models.adapter.layers) + flops(layers.subspan(models.adapter.cloud_tap + 1));
}

namespace {

RouteRecord route_with(const EccModels& models, const EccPolicy& policy, const Tensor& input, PolicyVariant expect) {
  if (policy.variant != expect) {
    throw UsageError("route_" + std::string(to_string(expect)) + ": policy variant is " +
                     std::string(to_string(policy.variant)));
  }
  policy.validate();
  const Tensor x = input.as_batch();
  if (x.rows() != 1) throw UsageError("route: expected a single sample");

  const bool needs_tap = policy.variant != PolicyVariant::kIndependent;
  TapOutput edge_out = needs_tap ? infer_with_tap(models.edge, x, models.adapter.edge_tap)
                                 : TapOutput{infer(models.edge, x), {}};

  RouteRecord rec;
  rec.confidence = confidence(edge_out.probs.row(0), models.edge.normal_class, policy.confidence_mode);
  rec.route = decide_route(policy, rec.confidence);
  rec.flops_edge = flops(models.edge.layers);

  switch (rec.route) {
    case Route::kEdgeOnly:
      rec.prediction = argmax(edge_out.probs.row(0));
      break;
    case Route::kAdaptive: {
      const FeatureMap adapted = adapt(models.adapter, edge_out.feature);
      const Tensor probs = cloud_tail(models.adaptive_cloud, adapted, models.adapter.cloud_tap);
      rec.prediction = argmax(probs.row(0));
      rec.bytes_sent = edge_out.feature.values.size() * policy.bytes_per_element;
      rec.flops_cloud_side = adaptive_cloud_flops(models);
      break;
    }
    case Route::kFullCloud: {
      const Tensor probs = infer(models.cloud, x);
      rec.prediction = argmax(probs.row(0));
      rec.bytes_sent = x.size() * policy.bytes_per_element;
      rec.flops_cloud_side = flops(models.cloud.layers);
      break;
    }
  }
  return rec;
}

}  // namespace

RouteRecord route_independent(const EccModels& models, const EccPolicy& policy, const Tensor& input) {
  return route_with(models, policy, input, PolicyVariant::kIndependent);
}

RouteRecord route_adaptive(const EccModels& models, const EccPolicy& policy, const Tensor& input) {
  return route_with(models, policy, input, PolicyVariant::kAdaptive);
}

RouteRecord route_dynamic(const EccModels& models, const EccPolicy& policy, const Tensor& input) {
  return route_with(models, policy, input, PolicyVariant::kDynamic);
}

RouteRecord route(const EccModels& models, const EccPolicy& policy, const Tensor& input) {
  return route_with(models, policy, input, policy.variant);
}

PolicyEvaluation evaluate_policy(const EccModels& models, const EccPolicy& policy, const Split& data) {
  models.validate();
  data.validate(models.edge.num_classes);
  PolicyEvaluation out;
  out.records.reserve(data.size());
  std::vector<std::size_t> predictions;
  predictions.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Tensor x = data.features.slice_rows(i, 1);
    RouteRecord rec = route(models, policy, x);
    predictions.push_back(rec.prediction);
    switch (rec.route) {
      case Route::kEdgeOnly: ++out.edge_only; break;
      case Route::kAdaptive: ++out.adaptive; break;
      case Route::kFullCloud: ++out.full_cloud; break;
    }
    out.records.push_back(rec);
  }
  out.metrics = classification_metrics(predictions, data.labels, models.edge.normal_class);
  return out;
}

}  // namespace ecc

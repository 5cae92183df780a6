#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ecc/data.hpp"
#include "ecc/models.hpp"

namespace ecc {

enum class PolicyVariant { kIndependent, kAdaptive, kDynamic };
std::string_view to_string(PolicyVariant v);
PolicyVariant parse_policy_variant(std::string_view text);

struct EccPolicy {
  PolicyVariant variant = PolicyVariant::kIndependent;
  double c1 = 0.8;
  // Dynamic only: lower threshold selecting the adaptive branch.
  double c2 = 0.0;
  ConfidenceMode confidence_mode = ConfidenceMode::kNormalClass;
  // Bytes per transmitted element for raw inputs and feature maps alike.
  std::size_t bytes_per_element = 4;
  std::string label;

  static EccPolicy independent(double c1);
  static EccPolicy adaptive(double c1);
  static EccPolicy dynamic(double c1, double c2);

  // c1 in [0, 1]; for dynamic 0 <= c2 <= c1.
  void validate() const;
};

// The models a policy routes between. `adaptive_cloud` supplies the layers
// after the adapter's cloud tap on the adaptive branch; it is the cloud with a
// fine-tuned tail, or a plain copy of `cloud` when no fine-tuning ran.
struct EccModels {
  ModelSpec edge;
  ModelSpec cloud;
  AdapterSpec adapter;
  ModelSpec adaptive_cloud;

  void validate() const;
};

enum class Route { kEdgeOnly, kAdaptive, kFullCloud };
std::string_view to_string(Route r);

struct RouteRecord {
  Route route = Route::kEdgeOnly;
  double confidence = 0.0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t flops_edge = 0;
  std::uint64_t flops_cloud_side = 0;
  std::size_t prediction = 0;

  friend bool operator==(const RouteRecord&, const RouteRecord&) = default;
};

// Branch choice from the edge confidence alone:
//   C >= c1 -> edge-only; adaptive: otherwise adaptive; independent: otherwise
//   full cloud; dynamic: c2 <= C < c1 adaptive, C < c2 full cloud.
Route decide_route(const EccPolicy& policy, double edge_confidence);

std::uint64_t adaptive_cloud_flops(const EccModels& models);

RouteRecord route_independent(const EccModels& models, const EccPolicy& policy, const Tensor& input);
RouteRecord route_adaptive(const EccModels& models, const EccPolicy& policy, const Tensor& input);
RouteRecord route_dynamic(const EccModels& models, const EccPolicy& policy, const Tensor& input);
// Dispatches on policy.variant.
RouteRecord route(const EccModels& models, const EccPolicy& policy, const Tensor& input);

struct PolicyEvaluation {
  std::vector<RouteRecord> records;
  ClassificationMetrics metrics;
  std::size_t edge_only = 0;
  std::size_t adaptive = 0;
  std::size_t full_cloud = 0;
};

PolicyEvaluation evaluate_policy(const EccModels& models, const EccPolicy& policy, const Split& data);

}  // namespace ecc

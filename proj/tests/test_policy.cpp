#include <gtest/gtest.h>

#include <random>

#include "ecc/errors.hpp"
#include "ecc/policy.hpp"

using namespace ecc;

namespace {

EccModels random_system(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  EccModels m;
  m.edge = make_mlp("edge", 6, std::vector<std::size_t>{4}, 3, 0);
  m.cloud = make_mlp("cloud", 6, std::vector<std::size_t>{8, 8, 8}, 3, 0);
  init_model(m.edge, rng);
  init_model(m.cloud, rng);
  m.adapter = AdapterSpec::make(0, 1, 4, 8, 1, Activation::kRelu);
  init_adapter(m.adapter, rng);
  m.adaptive_cloud = m.cloud;
  return m;
}

Split random_split(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 2.0);
  Split s;
  s.features = Tensor({n, 6});
  for (auto& v : s.features.values()) v = g(rng);
  for (std::size_t i = 0; i < n; ++i) s.labels.push_back(i % 3);
  return s;
}

Tensor row(const Split& s, std::size_t i) {
  auto r = s.features.row(i);
  return Tensor::vector(std::vector<double>(r.begin(), r.end()));
}

}  // namespace

TEST(EccPolicy, Validation) {
  EXPECT_NO_THROW(EccPolicy::dynamic(0.8, 0.4).validate());
  EXPECT_THROW(EccPolicy::dynamic(0.4, 0.8).validate(), ConfigError);
  EXPECT_THROW(EccPolicy::independent(1.1).validate(), ConfigError);
  EXPECT_THROW(EccPolicy::adaptive(-0.1).validate(), ConfigError);
  EXPECT_EQ(parse_policy_variant("dynamic"), PolicyVariant::kDynamic);
  EXPECT_THROW(parse_policy_variant("greedy"), ConfigError);
}

TEST(DecideRoute, RuleApplication) {
  EXPECT_EQ(decide_route(EccPolicy::independent(0.8), 0.9), Route::kEdgeOnly);
  EXPECT_EQ(decide_route(EccPolicy::independent(0.8), 0.8), Route::kEdgeOnly);
  EXPECT_EQ(decide_route(EccPolicy::independent(0.8), 0.79), Route::kFullCloud);
  EXPECT_EQ(decide_route(EccPolicy::independent(0.0), 0.0), Route::kEdgeOnly);
  EXPECT_EQ(decide_route(EccPolicy::independent(1.0), 0.999999), Route::kFullCloud);
  EXPECT_EQ(decide_route(EccPolicy::independent(1.0), 1.0), Route::kEdgeOnly);
  const auto d = EccPolicy::dynamic(0.8, 0.4);
  EXPECT_EQ(decide_route(d, 0.5), Route::kAdaptive);
  EXPECT_EQ(decide_route(d, 0.4), Route::kAdaptive);
  EXPECT_EQ(decide_route(d, 0.3), Route::kFullCloud);
  EXPECT_EQ(decide_route(d, 0.85), Route::kEdgeOnly);
}

TEST(Route, IndependentCosts) {
  EccModels m = random_system(1);
  Split s = random_split(2, 40);
  auto everything_edge = EccPolicy::independent(0.0);
  auto everything_cloud = EccPolicy::independent(1.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    Tensor x = row(s, i);
    RouteRecord e = route_independent(m, everything_edge, x);
    EXPECT_EQ(e.route, Route::kEdgeOnly);
    EXPECT_EQ(e.bytes_sent, 0u);
    EXPECT_EQ(e.flops_cloud_side, 0u);
    EXPECT_EQ(e.flops_edge, flops(m.edge.layers));
    EXPECT_EQ(e.prediction, argmax(infer(m.edge, x).data()));

    RouteRecord c = route_independent(m, everything_cloud, x);
    ASSERT_EQ(c.route, Route::kFullCloud);
    EXPECT_EQ(c.bytes_sent, 6u * 4u);
    EXPECT_EQ(c.flops_cloud_side, flops(m.cloud.layers));
    EXPECT_EQ(c.prediction, argmax(infer(m.cloud, x).data()));
  }
}

TEST(Route, AdaptiveBranchMatchesManualComposition) {
  EccModels m = random_system(3);
  Split s = random_split(4, 40);
  auto p = EccPolicy::adaptive(1.0);
  p.bytes_per_element = 2;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Tensor x = row(s, i);
    RouteRecord r = route_adaptive(m, p, x);
    ASSERT_EQ(r.route, Route::kAdaptive);
    TapOutput t = infer_with_tap(m.edge, x, 0);
    EXPECT_EQ(r.bytes_sent, t.feature.values.size() * 2);
    Tensor probs = cloud_tail(m.adaptive_cloud, adapt(m.adapter, t.feature), 1);
    EXPECT_EQ(r.prediction, argmax(probs.data()));
    EXPECT_EQ(r.flops_cloud_side, adaptive_cloud_flops(m));
    std::span<const LayerSpec> cl(m.cloud.layers);
    EXPECT_EQ(adaptive_cloud_flops(m), flops(m.adapter.layers) + flops(cl.subspan(2)));
  }
  auto zero = EccPolicy::adaptive(0.0);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(route_adaptive(m, zero, row(s, i)).route, Route::kEdgeOnly);
}

TEST(Route, BranchCollapse) {
  EccModels m = random_system(5);
  Split s = random_split(6, 200);
  for (double c1 : {0.3, 0.5, 0.8}) {
    auto a = evaluate_policy(m, EccPolicy::adaptive(c1), s);
    auto d0 = evaluate_policy(m, EccPolicy::dynamic(c1, 0.0), s);
    auto i = evaluate_policy(m, EccPolicy::independent(c1), s);
    auto dc = evaluate_policy(m, EccPolicy::dynamic(c1, c1), s);
    EXPECT_EQ(a.records, d0.records);
    EXPECT_EQ(i.records, dc.records);
  }
}

TEST(Route, MonotoneCounts) {
  EccModels m = random_system(7);
  Split s = random_split(8, 300);
  std::size_t prev_off = 0;
  for (double c1 : {0.0, 0.2, 0.3, 0.35, 0.4, 0.5, 0.7, 1.0}) {
    auto e = evaluate_policy(m, EccPolicy::independent(c1), s);
    EXPECT_GE(e.full_cloud, prev_off);
    prev_off = e.full_cloud;
  }
  std::size_t prev_full = 0, prev_adapt = s.size();
  for (double c2 : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6}) {
    auto e = evaluate_policy(m, EccPolicy::dynamic(0.6, c2), s);
    EXPECT_GE(e.full_cloud, prev_full);
    EXPECT_LE(e.adaptive, prev_adapt);
    EXPECT_EQ(e.edge_only + e.adaptive + e.full_cloud, s.size());
    prev_full = e.full_cloud;
    prev_adapt = e.adaptive;
  }
}

TEST(Route, EdgeOnlyRecordsCarryNoCloudCost) {
  EccModels m = random_system(9);
  Split s = random_split(10, 100);
  for (const auto& r : evaluate_policy(m, EccPolicy::dynamic(0.5, 0.3), s).records) {
    if (r.route == Route::kEdgeOnly) {
      EXPECT_EQ(r.bytes_sent, 0u);
      EXPECT_EQ(r.flops_cloud_side, 0u);
    }
  }
}

TEST(Route, MaxClassMode) {
  EccModels m = random_system(11);
  Split s = random_split(12, 50);
  auto p = EccPolicy::independent(0.6);
  p.confidence_mode = ConfidenceMode::kMaxClass;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Tensor x = row(s, i);
    Tensor probs = infer(m.edge, x);
    double mx = 0;
    for (double v : probs.values()) mx = std::max(mx, v);
    RouteRecord r = route(m, p, x);
    EXPECT_DOUBLE_EQ(r.confidence, mx);
    EXPECT_EQ(r.route == Route::kEdgeOnly, mx >= 0.6);
  }
}

TEST(EccModels, ValidationCatchesTapMismatch) {
  EccModels m = random_system(1);
  EXPECT_NO_THROW(m.validate());
  m.adapter = AdapterSpec::make(0, 1, 4, 7, 1, Activation::kRelu);
  EXPECT_THROW(m.validate(), ConfigError);
}

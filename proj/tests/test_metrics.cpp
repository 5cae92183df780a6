#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ecc/errors.hpp"
#include "ecc/metrics.hpp"
#include "oracles.hpp"

using namespace ecc;

namespace {

RouteRecord rec(Route r, std::uint64_t bytes, std::uint64_t cloud_flops) {
  RouteRecord x;
  x.route = r;
  x.bytes_sent = bytes;
  x.flops_cloud_side = cloud_flops;
  return x;
}

ParetoPoint pc(std::string label, double perf, double comp) {
  return {std::move(label), {perf, comp}, {Sense::kMaximize, Sense::kMinimize}};
}

}  // namespace

TEST(CommScore, EdgeAndCloudAnchors) {
  std::vector<RouteRecord> edge(10, rec(Route::kEdgeOnly, 0, 0));
  auto e = comm_score(edge, 3072);
  EXPECT_EQ(e.tau, 0.0);
  EXPECT_EQ(e.psi, 0.0);
  EXPECT_EQ(e.s_comm, 0.0);
  std::vector<RouteRecord> cloud(10, rec(Route::kFullCloud, 3072, 100));
  auto c = comm_score(cloud, 3072);
  EXPECT_EQ(c.tau, 1.0);
  EXPECT_EQ(c.psi, 1.0);
  EXPECT_EQ(c.s_comm, 1.0);
}

TEST(CommScore, FeatureMapsLargerThanInput) {
  // 3x32x32 input, 16x16x16 tap feature, 60% offloaded.
  std::vector<RouteRecord> r;
  for (int i = 0; i < 60; ++i) r.push_back(rec(Route::kAdaptive, 4096 * 4, 1));
  for (int i = 0; i < 40; ++i) r.push_back(rec(Route::kEdgeOnly, 0, 0));
  auto s = comm_score(r, 3072 * 4);
  EXPECT_NEAR(s.psi, 4096.0 / 3072.0, 1e-12);
  EXPECT_NEAR(s.tau, 0.6, 1e-12);
  EXPECT_NEAR(s.s_comm, 0.8, 5e-4);
  EXPECT_NEAR(s.s_comm, s.tau * s.psi, 1e-12);
}

TEST(CommScore, MixedPayloadsAverageOverAllSamples) {
  std::vector<RouteRecord> r{rec(Route::kAdaptive, 8, 1), rec(Route::kFullCloud, 16, 1), rec(Route::kEdgeOnly, 0, 0),
                             rec(Route::kEdgeOnly, 0, 0)};
  auto s = comm_score(r, 16);
  EXPECT_DOUBLE_EQ(s.tau, 0.5);
  EXPECT_DOUBLE_EQ(s.psi, 0.75);
  EXPECT_DOUBLE_EQ(s.s_comm, 24.0 / 64.0);
}

TEST(CompScore, ReferenceIndependentRow) {
  EXPECT_NEAR(comp_score(3.47, 38.50, 26.88), 0.6682, 5e-4);
  EXPECT_THROW(comp_score(5.0, 5.0, 5.0), ConfigError);
}

TEST(CompScore, RecordAggregation) {
  std::vector<RouteRecord> edge(4, rec(Route::kEdgeOnly, 0, 0));
  auto e = comp_score(10.0, 110.0, edge);
  EXPECT_EQ(e.flops_ecc, 10.0);
  EXPECT_EQ(e.s_comp, 0.0);
  std::vector<RouteRecord> cloud(4, rec(Route::kFullCloud, 1, 110));
  auto c = comp_score(10.0, 110.0, cloud);
  EXPECT_EQ(c.flops_ecc, 120.0);
  EXPECT_GT(c.s_comp, 1.0);
  std::vector<RouteRecord> mixed{rec(Route::kEdgeOnly, 0, 0), rec(Route::kAdaptive, 1, 40), rec(Route::kFullCloud, 1, 110),
                                 rec(Route::kFullCloud, 1, 110)};
  EXPECT_DOUBLE_EQ(comp_score(10.0, 110.0, mixed).flops_ecc, 10.0 + (40.0 + 220.0) / 4.0);
}

TEST(PerfScore, Examples) {
  EXPECT_NEAR(*perf_score(91.01, 77.32, 91.83), 0.9435, 5e-4);
  EXPECT_EQ(*perf_score(0.7, 0.7, 0.9), 0.0);
  EXPECT_EQ(*perf_score(0.9, 0.7, 0.9), 1.0);
  EXPECT_FALSE(perf_score(0.8, 0.7, 0.7).has_value());
  EXPECT_GT(*perf_score(0.95, 0.7, 0.9), 1.0);
}

TEST(PerfScore, AffineInvariance) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    double e = u(rng), c = e + 0.1 + u(rng), x = u(rng) * 2;
    double a = 0.5 + u(rng) * 100, b = u(rng) * 50 - 25;
    EXPECT_NEAR(*perf_score(a * x + b, a * e + b, a * c + b), *perf_score(x, e, c), 1e-12);
  }
}

// Further reference rows from raw FLOPS and accuracy figures.
TEST(ReferenceScores, ClassificationAndDetectionRows) {
  // Classification, MFLOPS, edge 3.47 / cloud 38.50; accuracy edge 77.32 / cloud 91.83.
  EXPECT_NEAR(comp_score(3.47, 38.50, 26.81), 0.6665, 5e-4);
  EXPECT_NEAR(comp_score(3.47, 38.50, 6.57), 0.0886, 5e-4);
  EXPECT_NEAR(*perf_score(90.92, 77.32, 91.83), 0.9373, 5e-4);
  EXPECT_NEAR(*perf_score(84.80, 77.32, 91.83), 0.5155, 5e-4);
  EXPECT_NEAR(*perf_score(91.33, 77.32, 91.83), 0.9655, 5e-4);
  EXPECT_NEAR(*perf_score(85.41, 77.32, 91.83), 0.5575, 5e-4);
  // Detection, GFLOPS, edge 0.35 / cloud 37.12.
  EXPECT_NEAR(comp_score(0.35, 37.12, 23.99), 0.643, 5e-4);
  EXPECT_NEAR(comp_score(0.35, 37.12, 21.31), 0.5702, 5e-4);
  EXPECT_NEAR(comp_score(0.35, 37.12, 7.65), 0.1987, 5e-4);
}

TEST(Dominance, Examples) {
  auto a = pc("A", 0.9, 0.7), b = pc("B", 0.8, 0.8), c = pc("C", 0.95, 0.9);
  EXPECT_TRUE(dominates(a, b));
  EXPECT_FALSE(dominates(a, a));
  EXPECT_FALSE(dominates(a, c));
  EXPECT_FALSE(dominates(c, a));
  ParetoPoint three{"D", {1, 2, 3}, {Sense::kMaximize, Sense::kMinimize, Sense::kMinimize}};
  EXPECT_THROW(dominates(a, three), UsageError);
}

TEST(ParetoFrontier, Examples) {
  std::vector<ParetoPoint> pts{pc("A", 0.9, 0.7), pc("B", 0.8, 0.8), pc("C", 0.95, 0.9)};
  auto f = pareto_frontier(pts);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].label, "A");
  EXPECT_EQ(f[1].label, "C");
  std::vector<ParetoPoint> one{pc("X", 0.1, 0.2)};
  EXPECT_EQ(pareto_frontier(one).size(), 1u);
  std::vector<ParetoPoint> dup{pc("X", 0.1, 0.2), pc("Y", 0.1, 0.2)};
  auto d = pareto_frontier(dup);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].label, "X");
  EXPECT_THROW(pareto_frontier(std::vector<ParetoPoint>{}), UsageError);
}

TEST(ParetoFrontier, MatchesBruteForce) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coarse(0, 9);
  for (int t = 0; t < 100; ++t) {
    std::vector<ParetoPoint> pts;
    const int n = 1 + t * 2;
    for (int i = 0; i < n; ++i) pts.push_back(pc("p" + std::to_string(i), coarse(rng) / 10.0, coarse(rng) / 10.0));
    auto f = pareto_frontier(pts);
    auto keep = oracle::brute_force_frontier(pts);
    ASSERT_EQ(f.size(), keep.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t j = 0; j < f.size(); ++j) EXPECT_FALSE(dominates(f[i], f[j]));
    }
    for (std::size_t i = 1; i < f.size(); ++i) EXPECT_LE(f[i - 1].objectives[0], f[i].objectives[0]);
  }
}

TEST(Reports, CsvRoundTrip) {
  CostReport a;
  a.label = "ECC_D(c1=0.8,c2=0.3)";
  a.s_p = 0.625;
  a.s_comp = 0.5;
  a.s_comm = 0.25;
  a.tau = 0.5;
  a.psi = 0.5;
  a.flops_ecc = 1234.5;
  a.accuracy = 0.8;
  a.recall = 0.9;
  CostReport b;
  b.label = "edge";
  std::vector<CostReport> in{a, b};
  std::stringstream ss;
  write_reports_csv(ss, in);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header, kReportCsvHeader);
  auto back = read_reports_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].label, a.label);
  EXPECT_DOUBLE_EQ(*back[0].s_p, 0.625);
  EXPECT_DOUBLE_EQ(back[0].flops_ecc, 1234.5);
  EXPECT_FALSE(back[1].s_p.has_value());
}

TEST(Reports, Baselines) {
  ClassificationMetrics e{0.7, 0.6}, c{0.9, 0.95};
  auto eb = edge_baseline(10, 100, e, c);
  auto cb = cloud_baseline(10, 100, e, c);
  EXPECT_EQ(*eb.s_p, 0.0);
  EXPECT_EQ(eb.s_comp, 0.0);
  EXPECT_EQ(eb.s_comm, 0.0);
  EXPECT_EQ(*cb.s_p, 1.0);
  EXPECT_EQ(cb.s_comp, 1.0);
  EXPECT_EQ(cb.s_comm, 1.0);
}

TEST(Reports, FrontierSkipsUndefinedPerformance) {
  CostReport a, b, c;
  a.label = "a";
  a.s_p = 0.9;
  a.s_comp = 0.5;
  b.label = "b";
  b.s_comp = 0.1;
  c.label = "c";
  c.s_p = 0.8;
  c.s_comp = 0.6;
  std::vector<CostReport> all{a, b, c};
  auto f = frontier_reports(all, FrontierAxis::kComputation);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].label, "a");
}

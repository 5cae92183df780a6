#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecc/policy.hpp"

namespace ecc {

// Communication: τ = offloaded / N, ψ = mean bytes_sent / input_bytes over the
// offloaded samples, s_comm = Σ bytes_sent / (N · input_bytes). With τ = 0,
// ψ and s_comm are 0.
struct CommScore {
  double tau = 0.0;
  double psi = 0.0;
  double s_comm = 0.0;
};
CommScore comm_score(std::span<const RouteRecord> records, std::uint64_t input_bytes);

// Computation: flops_ecc = flops_edge + mean cloud-side FLOPS per sample,
// s_comp = (flops_ecc - flops_edge) / (flops_cloud - flops_edge).
struct CompScore {
  double flops_ecc = 0.0;
  double s_comp = 0.0;
};
CompScore comp_score(double flops_edge, double flops_cloud, std::span<const RouteRecord> records);
// Score for an already aggregated FLOPS figure.
double comp_score(double flops_edge, double flops_cloud, double flops_ecc);

// Share of the edge-to-cloud performance gap closed; nullopt when the gap is 0.
std::optional<double> perf_score(double pi_ecc, double pi_edge, double pi_cloud);

enum class Sense { kMaximize, kMinimize };

struct ParetoPoint {
  std::string label;
  std::vector<double> objectives;
  std::vector<Sense> senses;
};

// a is no worse than b everywhere and strictly better somewhere.
bool dominates(const ParetoPoint& a, const ParetoPoint& b);

// Non-dominated subset, sorted ascending by the first objective; points with
// identical objective vectors are kept once (first occurrence).
std::vector<ParetoPoint> pareto_frontier(std::span<const ParetoPoint> points);

struct CostReport {
  std::string label;
  double tau = 0.0;
  double psi = 0.0;
  double s_comm = 0.0;
  double flops_ecc = 0.0;
  double flops_edge = 0.0;
  double flops_cloud = 0.0;
  double s_comp = 0.0;
  double pi_ecc = 0.0;
  double pi_edge = 0.0;
  double pi_cloud = 0.0;
  std::optional<double> s_p;
  double accuracy = 0.0;
  double recall = 0.0;
};

// Scores one evaluated policy; π is accuracy.
CostReport make_cost_report(std::string label, const PolicyEvaluation& eval, std::uint64_t input_bytes,
                            double flops_edge, double flops_cloud, const ClassificationMetrics& edge,
                            const ClassificationMetrics& cloud);
CostReport edge_baseline(double flops_edge, double flops_cloud, const ClassificationMetrics& edge,
                         const ClassificationMetrics& cloud);
CostReport cloud_baseline(double flops_edge, double flops_cloud, const ClassificationMetrics& edge,
                          const ClassificationMetrics& cloud);

enum class FrontierAxis { kComputation, kCommunication };

// (s_p maximised, s_comp or s_comm minimised). Reports without s_p are skipped.
std::vector<ParetoPoint> to_pareto_points(std::span<const CostReport> reports, FrontierAxis axis);
// Reports whose labels survive pareto_frontier, in frontier order.
std::vector<CostReport> frontier_reports(std::span<const CostReport> reports, FrontierAxis axis);

// Header: label,s_p,s_comp,s_comm,tau,psi,flops_ecc,accuracy,recall
inline constexpr const char* kReportCsvHeader = "label,s_p,s_comp,s_comm,tau,psi,flops_ecc,accuracy,recall";
void write_reports_csv(std::ostream& os, std::span<const CostReport> reports);
std::vector<CostReport> read_reports_csv(std::istream& is);

}  // namespace ecc

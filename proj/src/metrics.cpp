#include "ecc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ecc/errors.hpp"

namespace ecc {

CommScore comm_score(std::span<const RouteRecord> records, std::uint64_t input_bytes) {
  if (records.empty()) throw UsageError("comm_score: no records");
  if (input_bytes == 0) throw UsageError("comm_score: input_bytes must be positive");
  std::size_t offloaded = 0;
  double ratio_sum = 0.0;
  std::uint64_t total_bytes = 0;
  for (const auto& r : records) {
    total_bytes += r.bytes_sent;
    if (r.route == Route::kEdgeOnly) continue;
    ++offloaded;
    ratio_sum += static_cast<double>(r.bytes_sent) / static_cast<double>(input_bytes);
  }
  const double n = static_cast<double>(records.size());
  CommScore s;
  if (offloaded == 0) return s;
  s.tau = static_cast<double>(offloaded) / n;
  s.psi = ratio_sum / static_cast<double>(offloaded);
  s.s_comm = static_cast<double>(total_bytes) / (n * static_cast<double>(input_bytes));
  return s;
}

double comp_score(double flops_edge, double flops_cloud, double flops_ecc) {
  if (!(flops_cloud > flops_edge)) throw ConfigError("comp_score: cloud FLOPS must exceed edge FLOPS");
  return (flops_ecc - flops_edge) / (flops_cloud - flops_edge);
}

CompScore comp_score(double flops_edge, double flops_cloud, std::span<const RouteRecord> records) {
  if (records.empty()) throw UsageError("comp_score: no records");
  double cloud_side = 0.0;
  for (const auto& r : records) cloud_side += static_cast<double>(r.flops_cloud_side);
  CompScore s;
  s.flops_ecc = flops_edge + cloud_side / static_cast<double>(records.size());
  s.s_comp = comp_score(flops_edge, flops_cloud, s.flops_ecc);
  return s;
}

std::optional<double> perf_score(double pi_ecc, double pi_edge, double pi_cloud) {
  if (pi_cloud == pi_edge) return std::nullopt;
  return (pi_ecc - pi_edge) / (pi_cloud - pi_edge);
}

namespace {

void check_arity(const ParetoPoint& a, const ParetoPoint& b) {
  if (a.objectives.size() != b.objectives.size() || a.senses != b.senses ||
      a.senses.size() != a.objectives.size()) {
    throw UsageError("dominates: points '" + a.label + "' and '" + b.label + "' have different objective layouts");
  }
}

// Objective i oriented so that larger is better.
double oriented(const ParetoPoint& p, std::size_t i) {
  return p.senses[i] == Sense::kMaximize ? p.objectives[i] : -p.objectives[i];
}

}  // namespace

bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
  check_arity(a, b);
  bool strictly = false;
  for (std::size_t i = 0; i < a.objectives.size(); ++i) {
    const double x = oriented(a, i), y = oriented(b, i);
    if (x < y) return false;
    if (x > y) strictly = true;
  }
  return strictly;
}

std::vector<ParetoPoint> pareto_frontier(std::span<const ParetoPoint> points) {
  if (points.empty()) throw UsageError("pareto_frontier: no points");
  for (const auto& p : points) {
    check_arity(points.front(), p);
    for (double v : p.objectives) {
      if (!std::isfinite(v)) throw UsageError("pareto_frontier: non-finite objective in '" + p.label + "'");
    }
  }
  // Best-first lexicographic order: any dominator of a point precedes it, so
  // a point is kept iff no already kept point dominates it.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < points[a].objectives.size(); ++i) {
      const double x = oriented(points[a], i), y = oriented(points[b], i);
      if (x != y) return x > y;
    }
    return false;
  });
  std::vector<ParetoPoint> kept;
  for (auto idx : order) {
    const auto& p = points[idx];
    const bool drop = std::any_of(kept.begin(), kept.end(), [&](const ParetoPoint& k) {
      return k.objectives == p.objectives || dominates(k, p);
    });
    if (!drop) kept.push_back(p);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    return a.objectives < b.objectives;
  });
  return kept;
}

CostReport make_cost_report(std::string label, const PolicyEvaluation& eval, std::uint64_t input_bytes,
                            double flops_edge, double flops_cloud, const ClassificationMetrics& edge,
                            const ClassificationMetrics& cloud) {
  CostReport r;
  r.label = std::move(label);
  const auto comm = comm_score(eval.records, input_bytes);
  r.tau = comm.tau;
  r.psi = comm.psi;
  r.s_comm = comm.s_comm;
  const auto comp = comp_score(flops_edge, flops_cloud, eval.records);
  r.flops_ecc = comp.flops_ecc;
  r.flops_edge = flops_edge;
  r.flops_cloud = flops_cloud;
  r.s_comp = comp.s_comp;
  r.pi_ecc = eval.metrics.accuracy;
  r.pi_edge = edge.accuracy;
  r.pi_cloud = cloud.accuracy;
  r.s_p = perf_score(r.pi_ecc, r.pi_edge, r.pi_cloud);
  r.accuracy = eval.metrics.accuracy;
  r.recall = eval.metrics.recall;
  return r;
}

CostReport edge_baseline(double flops_edge, double flops_cloud, const ClassificationMetrics& edge,
                         const ClassificationMetrics& cloud) {
  CostReport r;
  r.label = "edge";
  r.flops_ecc = r.flops_edge = flops_edge;
  r.flops_cloud = flops_cloud;
  r.s_comp = comp_score(flops_edge, flops_cloud, flops_edge);
  r.pi_ecc = r.pi_edge = edge.accuracy;
  r.pi_cloud = cloud.accuracy;
  r.s_p = perf_score(r.pi_ecc, r.pi_edge, r.pi_cloud);
  r.accuracy = edge.accuracy;
  r.recall = edge.recall;
  return r;
}

CostReport cloud_baseline(double flops_edge, double flops_cloud, const ClassificationMetrics& edge,
                          const ClassificationMetrics& cloud) {
  CostReport r;
  r.label = "cloud";
  r.tau = r.psi = r.s_comm = 1.0;
  r.flops_edge = flops_edge;
  r.flops_ecc = r.flops_cloud = flops_cloud;
  r.s_comp = comp_score(flops_edge, flops_cloud, flops_cloud);
  r.pi_edge = edge.accuracy;
  r.pi_ecc = r.pi_cloud = cloud.accuracy;
  r.s_p = perf_score(r.pi_ecc, r.pi_edge, r.pi_cloud);
  r.accuracy = cloud.accuracy;
  r.recall = cloud.recall;
  return r;
}

std::vector<ParetoPoint> to_pareto_points(std::span<const CostReport> reports, FrontierAxis axis) {
  std::vector<ParetoPoint> out;
  for (const auto& r : reports) {
    if (!r.s_p) continue;
    const double cost = axis == FrontierAxis::kComputation ? r.s_comp : r.s_comm;
    out.push_back({r.label, {*r.s_p, cost}, {Sense::kMaximize, Sense::kMinimize}});
  }
  return out;
}

std::vector<CostReport> frontier_reports(std::span<const CostReport> reports, FrontierAxis axis) {
  const auto points = to_pareto_points(reports, axis);
  std::vector<CostReport> out;
  if (points.empty()) return out;
  for (const auto& p : pareto_frontier(points)) {
    auto it = std::find_if(reports.begin(), reports.end(), [&](const CostReport& r) { return r.label == p.label; });
    out.push_back(*it);
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

double parse_number(const std::string& text, std::size_t line, const char* column) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ConfigError("reports csv line " + std::to_string(line) + ": bad " + column + " '" + text + "'");
  }
  return v;
}

}  // namespace

void write_reports_csv(std::ostream& os, std::span<const CostReport> reports) {
  os << kReportCsvHeader << '\n';
  for (const auto& r : reports) {
    os << csv_field(r.label) << ',' << (r.s_p ? fmt(*r.s_p) : "NA") << ',' << fmt(r.s_comp) << ','
       << fmt(r.s_comm) << ',' << fmt(r.tau) << ',' << fmt(r.psi) << ',' << fmt(r.flops_ecc) << ','
       << fmt(r.accuracy) << ',' << fmt(r.recall) << '\n';
  }
}

std::vector<CostReport> read_reports_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("reports csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kReportCsvHeader) throw ConfigError("reports csv: unexpected header '" + line + "'");
  std::vector<CostReport> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw ConfigError("reports csv line " + std::to_string(lineno) + ": expected 9 columns");
    CostReport r;
    r.label = f[0];
    if (f[1] != "NA") r.s_p = parse_number(f[1], lineno, "s_p");
    r.s_comp = parse_number(f[2], lineno, "s_comp");
    r.s_comm = parse_number(f[3], lineno, "s_comm");
    r.tau = parse_number(f[4], lineno, "tau");
    r.psi = parse_number(f[5], lineno, "psi");
    r.flops_ecc = parse_number(f[6], lineno, "flops_ecc");
    r.accuracy = parse_number(f[7], lineno, "accuracy");
    r.recall = parse_number(f[8], lineno, "recall");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ecc

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "costa/executor.hpp"
#include "costa/registry.hpp"
#include "costa/search.hpp"
#include "costa/toolgraph.hpp"

namespace costa {

// ---------------------------------------------------------------------------
// Exhaustive optimum
// ---------------------------------------------------------------------------

/// Combined objective of a full path under benchmark values.
double path_objective(std::span<const NodeId> path, std::span<const NodeCost> costs, Alpha alpha);
double path_time(std::span<const NodeId> path, std::span<const NodeCost> costs);

struct OracleOptions {
  double quality_threshold = 0.8;  // paths through a node below this are infeasible
  int max_retries = 3;
  std::size_t path_cap = kDefaultPathCap;
};

struct OracleReport {
  bool feasible = false;  // some path clears the threshold at every node
  std::vector<NodeId> best_path;
  double best_objective = 0.0;
  double min_total_time = 0.0;  // min sum of C over feasible paths
  bool astar_found = false;
  std::vector<NodeId> astar_path;
  double astar_objective = 0.0;
  double astar_total_time = 0.0;
  double gap = 0.0;  // astar_objective - best_objective
  std::size_t paths_enumerated = 0;
};

/// Enumerates every ROOT-to-leaf path, scores it with benchmark values, and
/// compares the minimum with a deterministic A* run on the same graph.
/// Throws Error{PathExplosion} above options.path_cap.
OracleReport brute_force_optimal(const ToolSubgraph& g, const BenchmarkTable& bt, Alpha alpha,
                                 const OracleOptions& options = {});

std::string oracle_report_to_json(const OracleReport& report, double alpha);

// ---------------------------------------------------------------------------
// Accuracy aggregation
// ---------------------------------------------------------------------------

/// Per-subtask human scores restricted to {0, 0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 1}.
class AccuracyRecord {
 public:
  /// Throws Error{InvalidScore} for a score outside the vocabulary.
  explicit AccuracyRecord(std::vector<double> scores);
  const std::vector<double>& scores() const noexcept { return scores_; }

  static bool is_valid_score(double s);

 private:
  std::vector<double> scores_;
};

/// Mean subtask score. Throws Error{EmptyRecord}.
double task_accuracy(const AccuracyRecord& record);

/// Mean task accuracy. Throws Error{EmptyRecord}.
double overall_accuracy(std::span<const double> task_scores);

// ---------------------------------------------------------------------------
// Pareto analysis
// ---------------------------------------------------------------------------

struct ParetoPoint {
  double alpha = 0.0;
  double total_time = 0.0;
  double quality_product = 1.0;
  double g_final = 0.0;

  bool operator==(const ParetoPoint&) const = default;
};

/// True iff `a` is no slower and no worse in quality than `b`, strictly
/// better in at least one.
bool dominates(const ParetoPoint& a, const ParetoPoint& b);

/// Flags each point that no other point dominates.
std::vector<bool> pareto_flags(std::span<const ParetoPoint> points);

/// Non-dominated subset in input order.
std::vector<ParetoPoint> pareto_filter(std::span<const ParetoPoint> points);

/// One search per alpha, run concurrently, returned in input order. Throws
/// Error{SearchExhausted} when some alpha finds no path.
std::vector<ParetoPoint> sweep_alpha(const ToolSubgraph& g, const BenchmarkTable& bt,
                                     const SimulatorSpec& sim, std::span<const double> alphas,
                                     const SearchConfig& base = {});

/// `alpha,total_time,quality_product,g_final[,non_dominated]`, 9 significant digits.
std::string pareto_csv(std::span<const ParetoPoint> points, bool with_flags);

// ---------------------------------------------------------------------------
// Seeded random instances
// ---------------------------------------------------------------------------

struct RandomInstanceOptions {
  std::size_t max_nodes = 12;       // ROOT included
  std::uint64_t max_paths = 10'000;
  bool unit_quality = false;
  double min_quality = 0.8;         // raw quality drawn from [min_quality, 1]
};

struct RandomInstance {
  ToolSubgraph graph;
  BenchmarkTable bt;
};

/// A connected DAG under ROOT with one synthetic tool per node and a
/// matching benchmark table. Same seed, same instance.
RandomInstance make_random_instance(std::uint64_t seed, const RandomInstanceOptions& options = {});

struct VerifyRow {
  std::size_t instance = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  bool unit_quality = false;
  OracleReport report;
};

/// Runs the oracle over `count` random instances (every other one with
/// unit quality) for each alpha.
std::vector<VerifyRow> verify_random_instances(std::size_t count, std::uint64_t seed,
                                               std::span<const double> alphas,
                                               const RandomInstanceOptions& instance_options,
                                               const OracleOptions& oracle_options);

/// `instance,seed,alpha,unit_quality,paths,best_objective,astar_objective,gap,min_total_time,astar_total_time`
std::string verify_csv(std::span<const VerifyRow> rows);

}  // namespace costa

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "costa/executor.hpp"
#include "costa/registry.hpp"
#include "costa/toolgraph.hpp"
#include "costa/trace.hpp"

namespace costa {

/// Cost/quality tradeoff exponent: 2 weighs only time, 0 only quality.
class Alpha {
 public:
  /// Throws Error{AlphaOutOfRange} outside [0, 2].
  explicit Alpha(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

inline constexpr std::uint64_t kDefaultSeed = 20250101;

struct SearchConfig {
  Alpha alpha{1.0};
  double quality_threshold = 0.8;
  int max_retries = 3;
  std::size_t queue_cap = 100'000;
  std::uint64_t seed = kDefaultSeed;
};

/// Benchmark (C, Q) of the row a node executes; ROOT is (0, 1).
struct NodeCost {
  double time = 0.0;
  double quality = 1.0;
};

/// Throws Error{MissingBenchmark} for a non-ROOT node without a row.
std::vector<NodeCost> benchmark_costs(const ToolSubgraph& g, const BenchmarkTable& bt);

/// time^alpha * (2 - quality)^(2 - alpha), with 0^0 = 1 and the ROOT
/// convention that an empty prefix (time 0, quality 1) costs 0.
double compute_g(double cum_time, double cum_quality, Alpha alpha);

struct HeuristicEntry {
  double h = 0.0;
  double h_cost = 0.0;     // accumulated best-case suffix time
  double h_quality = 1.0;  // accumulated best-case suffix quality product
};

/// Best-case suffix estimate for every node, computed leaves-first. A node
/// takes the successor minimising (h_cost(y) + C(y))^a * (2 - Q(y) h_quality(y))^(2-a)
/// (lowest id on ties) and inherits that successor's accumulated components.
std::vector<HeuristicEntry> precompute_heuristics(const ToolSubgraph& g, std::span<const NodeCost> costs,
                                                  Alpha alpha);
std::vector<HeuristicEntry> precompute_heuristics(const ToolSubgraph& g, const BenchmarkTable& bt,
                                                  Alpha alpha);

struct PathStep {
  NodeId node = 0;
  double time_seconds = 0.0;  // all attempts on this node, failed ones included
  double quality = 1.0;       // quality of the accepted attempt
  int attempts = 0;
};

struct PathState {
  std::vector<PathStep> steps;  // starts at ROOT
  double cum_time = 0.0;
  double cum_quality = 1.0;
  double g = 0.0;
  double f = 0.0;

  std::vector<NodeId> node_ids() const;
};

struct RetryOutcome {
  bool succeeded = false;
  double extra_time = 0.0;  // time of the retry attempts only
  double final_quality = 0.0;
  int attempts = 1;         // total invocations, the failed first one included
};

/// Re-runs a node that failed its first attempt, passing attempt indices
/// 2..max_retries+1 until one meets the threshold. Each attempt is appended
/// to `trace` when given.
RetryOutcome retry_node(const PlanNode& node, const Executor& exec, const SearchConfig& cfg,
                        ExecutionTrace* trace = nullptr);

enum class SearchStatus { Found, Exhausted };

std::string_view to_string(SearchStatus s);

struct PlanResult {
  SearchStatus status = SearchStatus::Exhausted;
  double alpha = 1.0;
  PathState path;
  ExecutionTrace trace;
  std::size_t expanded_count = 0;  // queue pops, the returned leaf included
  std::vector<double> popped_f;    // f of every pop, in order
};

/// Best-first search over the subgraph ordered by f = g + h with
/// (f, insertion) tie-breaking. Successors are executed on expansion; a
/// node below the quality threshold goes through retry_node and its path
/// is dropped if every retry fails. A path into a node is pruned when an
/// earlier path reached the same node with lower g, no more time, and no
/// less quality. Throws Error{QueueOverflow}.
PlanResult astar_search(const ToolSubgraph& g, std::span<const HeuristicEntry> heuristics,
                        const Executor& exec, const SearchConfig& cfg);

/// `{status, alpha, path:[{node, tool, subtask, argument, ordinal, c, q, attempts}],
///   totals:{time, quality_product, g, f}, expanded_count}`
std::string plan_result_to_json(const PlanResult& result, const ToolSubgraph& g);

}  // namespace costa

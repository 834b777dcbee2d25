#include "costa/search.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>
#include <queue>
#include <tuple>

#include <json.hpp>

#include "costa/dag.hpp"
#include "costa/error.hpp"

namespace costa {

Alpha::Alpha(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 2.0)) {
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in [0, 2], got " + std::to_string(value));
  }
}

std::vector<NodeCost> benchmark_costs(const ToolSubgraph& g, const BenchmarkTable& bt) {
  std::vector<NodeCost> costs(g.size());
  for (const auto& n : g.nodes()) {
    if (n.is_root()) continue;
    const auto& e = bt.at(n.tool, n.task);
    costs[n.id] = NodeCost{e.time_seconds, e.quality_norm};
  }
  return costs;
}

double compute_g(double cum_time, double cum_quality, Alpha alpha) {
  if (cum_time == 0.0 && cum_quality == 1.0) return 0.0;
  const double a = alpha.value();
  return std::pow(cum_time, a) * std::pow(2.0 - cum_quality, 2.0 - a);
}

std::vector<HeuristicEntry> precompute_heuristics(const ToolSubgraph& g, std::span<const NodeCost> costs,
                                                  Alpha alpha) {
  if (costs.size() != g.size()) {
    throw Error(ErrorCode::InvalidArgument, "cost vector does not match graph size");
  }
  const double a = alpha.value();
  const auto order = topological_order(g.adjacency());
  std::vector<HeuristicEntry> h(g.size());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId x = *it;
    if (g.is_leaf(x)) {
      h[x] = HeuristicEntry{};
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    HeuristicEntry chosen;
    for (NodeId y : g.successors(x)) {
      const double suffix_time = h[y].h_cost + costs[y].time;
      const double suffix_quality = costs[y].quality * h[y].h_quality;
      const double value = std::pow(suffix_time, a) * std::pow(2.0 - suffix_quality, 2.0 - a);
      if (value < best) {
        best = value;
        chosen = HeuristicEntry{value, suffix_time, suffix_quality};
      }
    }
    h[x] = chosen;
  }
  return h;
}

std::vector<HeuristicEntry> precompute_heuristics(const ToolSubgraph& g, const BenchmarkTable& bt,
                                                  Alpha alpha) {
  const auto costs = benchmark_costs(g, bt);
  return precompute_heuristics(g, costs, alpha);
}

std::vector<NodeId> PathState::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(steps.size());
  for (const auto& s : steps) ids.push_back(s.node);
  return ids;
}

std::string_view to_string(SearchStatus s) {
  return s == SearchStatus::Found ? "found" : "exhausted";
}

namespace {

TraceEvent make_event(const PlanNode& node, const ExecutionOutcome& o, Decision d) {
  TraceEvent e;
  e.node = node.id;
  e.tool = node.tool.name();
  e.subtask = node.task.name();
  e.attempt = o.attempt;
  e.time_seconds = o.time_seconds;
  e.quality = o.quality;
  e.decision = d;
  return e;
}

}  // namespace

RetryOutcome retry_node(const PlanNode& node, const Executor& exec, const SearchConfig& cfg,
                        ExecutionTrace* trace) {
  RetryOutcome out;
  for (int attempt = 2; attempt <= cfg.max_retries + 1; ++attempt) {
    const ExecutionOutcome o = exec.run(node, attempt);
    out.attempts = attempt;
    out.extra_time += o.time_seconds;
    out.final_quality = o.quality;
    const bool pass = validate_quality(o, cfg.quality_threshold);
    if (trace) {
      const Decision d = pass ? Decision::Accepted
                              : (attempt == cfg.max_retries + 1 ? Decision::Dropped : Decision::Retry);
      trace->append(make_event(node, o, d));
    }
    if (pass) {
      out.succeeded = true;
      return out;
    }
  }
  return out;
}

PlanResult astar_search(const ToolSubgraph& g, std::span<const HeuristicEntry> heuristics,
                        const Executor& exec, const SearchConfig& cfg) {
  if (heuristics.size() != g.size()) {
    throw Error(ErrorCode::InvalidArgument, "heuristic table does not match graph size");
  }
  const Alpha alpha = cfg.alpha;

  // Paths are stored as a parent-linked arena; the queue holds indices.
  struct Record {
    std::size_t parent;
    NodeId node;
    double time;
    double quality;
    int attempts;
    double cum_time;
    double cum_quality;
    double g;
    double f;
  };
  constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();
  std::vector<Record> arena;

  using Entry = std::tuple<double, std::uint64_t, std::size_t>;  // (f, insertion, record)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::uint64_t inserted = 0;

  // Node-global best g and the (time, quality) of the path that set it.
  struct Best {
    double g = std::numeric_limits<double>::infinity();
    double time = 0.0;
    double quality = 0.0;
  };
  std::vector<Best> best(g.size());
  best[ToolSubgraph::kRoot] = Best{0.0, 0.0, 1.0};

  PlanResult result;
  result.alpha = alpha.value();

  arena.push_back(Record{kNoParent, ToolSubgraph::kRoot, 0.0, 1.0, 0, 0.0, 1.0, 0.0,
                         heuristics[ToolSubgraph::kRoot].h});
  queue.emplace(arena.back().f, inserted++, 0);

  auto build_path = [&](std::size_t idx) {
    PathState p;
    const Record& last = arena[idx];
    p.cum_time = last.cum_time;
    p.cum_quality = last.cum_quality;
    p.g = last.g;
    p.f = last.f;
    for (std::size_t i = idx; i != kNoParent; i = arena[i].parent) {
      const Record& r = arena[i];
      p.steps.push_back(PathStep{r.node, r.time, r.quality, r.attempts});
    }
    std::reverse(p.steps.begin(), p.steps.end());
    return p;
  };

  while (!queue.empty()) {
    const auto [f, seq, idx] = queue.top();
    queue.pop();
    ++result.expanded_count;
    result.popped_f.push_back(f);

    const NodeId x = arena[idx].node;
    if (g.is_leaf(x)) {
      result.status = SearchStatus::Found;
      result.path = build_path(idx);
      return result;
    }

    for (NodeId y : g.successors(x)) {
      const PlanNode& node = g.node(y);
      const Record& cur = arena[idx];

      const ExecutionOutcome first = exec.run(node, 1);
      double node_time = first.time_seconds;
      double node_quality = first.quality;
      int attempts = 1;
      double g_literal = std::numeric_limits<double>::quiet_NaN();
      const double g_new = compute_g(cur.cum_time + first.time_seconds,
                                     cur.cum_quality * first.quality, alpha);

      if (validate_quality(first, cfg.quality_threshold)) {
        result.trace.append(make_event(node, first, Decision::Accepted));
      } else {
        result.trace.append(make_event(
            node, first, cfg.max_retries > 0 ? Decision::Retry : Decision::Dropped));
        const RetryOutcome retry = retry_node(node, exec, cfg, &result.trace);
        if (!retry.succeeded) continue;  // path dropped, node-global g untouched
        node_time += retry.extra_time;
        node_quality = retry.final_quality;
        attempts = retry.attempts;
        g_literal = g_new + compute_g(retry.extra_time, retry.final_quality, alpha);
      }

      const double cum_time = cur.cum_time + node_time;
      const double cum_quality = cur.cum_quality * node_quality;
      const double g_path = compute_g(cum_time, cum_quality, alpha);

      result.trace.annotate_last(g_path, std::isnan(g_literal) ? std::nullopt : std::optional(g_literal));

      Best& b = best[y];
      if (g_path > b.g && cum_time >= b.time && cum_quality <= b.quality) continue;
      if (g_path < b.g) b = Best{g_path, cum_time, cum_quality};

      const double f_y = g_path + heuristics[y].h;
      arena.push_back(Record{idx, y, node_time, node_quality, attempts, cum_time, cum_quality, g_path, f_y});
      queue.emplace(f_y, inserted++, arena.size() - 1);
      if (queue.size() > cfg.queue_cap) {
        throw Error(ErrorCode::QueueOverflow,
                    "queue exceeded " + std::to_string(cfg.queue_cap) + " paths");
      }
    }
  }

  result.status = SearchStatus::Exhausted;
  return result;
}

std::string plan_result_to_json(const PlanResult& result, const ToolSubgraph& g) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["status"] = to_string(result.status);
  doc["alpha"] = result.alpha;
  doc["path"] = ojson::array();
  for (const auto& step : result.path.steps) {
    const PlanNode& n = g.node(step.node);
    if (n.is_root()) continue;
    ojson j;
    j["node"] = step.node;
    j["tool"] = n.tool.name();
    j["subtask"] = n.task.name();
    j["argument"] = n.serves ? n.serves->argument : "";
    j["ordinal"] = n.serves ? n.serves->ordinal : 0;
    j["c"] = step.time_seconds;
    j["q"] = step.quality;
    j["attempts"] = step.attempts;
    doc["path"].push_back(std::move(j));
  }
  doc["totals"] = {{"time", result.path.cum_time},
                   {"quality_product", result.path.cum_quality},
                   {"g", result.path.g},
                   {"f", result.path.f}};
  doc["expanded_count"] = result.expanded_count;
  return doc.dump(2);
}

}  // namespace costa

#include "costa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <random>
#include <set>

#include <json.hpp>

#include "costa/error.hpp"

namespace costa {

namespace {

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

double path_time(std::span<const NodeId> path, std::span<const NodeCost> costs) {
  double t = 0.0;
  for (NodeId v : path) t += costs[v].time;
  return t;
}

double path_objective(std::span<const NodeId> path, std::span<const NodeCost> costs, Alpha alpha) {
  double q = 1.0;
  for (NodeId v : path) q *= costs[v].quality;
  return compute_g(path_time(path, costs), q, alpha);
}

OracleReport brute_force_optimal(const ToolSubgraph& g, const BenchmarkTable& bt, Alpha alpha,
                                 const OracleOptions& options) {
  const auto costs = benchmark_costs(g, bt);
  const auto paths = enumerate_paths(g, options.path_cap);

  OracleReport report;
  report.paths_enumerated = paths.size();
  report.best_objective = std::numeric_limits<double>::infinity();
  report.min_total_time = std::numeric_limits<double>::infinity();
  for (const auto& p : paths) {
    const bool ok = std::all_of(p.begin(), p.end(), [&](NodeId v) {
      return costs[v].quality >= options.quality_threshold;
    });
    if (!ok) continue;
    report.feasible = true;
    const double obj = path_objective(p, costs, alpha);
    if (obj < report.best_objective) {
      report.best_objective = obj;
      report.best_path = p;
    }
    report.min_total_time = std::min(report.min_total_time, path_time(p, costs));
  }

  SearchConfig cfg;
  cfg.alpha = alpha;
  cfg.quality_threshold = options.quality_threshold;
  cfg.max_retries = options.max_retries;
  const SimulatedExecutor exec(SimulatorSpec{}, bt, kDefaultSeed);
  const auto h = precompute_heuristics(g, costs, alpha);
  const PlanResult result = astar_search(g, h, exec, cfg);
  report.astar_found = result.status == SearchStatus::Found;
  if (report.astar_found) {
    report.astar_path = result.path.node_ids();
    report.astar_objective = path_objective(report.astar_path, costs, alpha);
    report.astar_total_time = path_time(report.astar_path, costs);
  }

  if (report.feasible && report.astar_found) {
    report.gap = report.astar_objective - report.best_objective;
  } else {
    report.best_objective = 0.0;
    report.min_total_time = 0.0;
    report.gap = 0.0;
  }
  return report;
}

std::string oracle_report_to_json(const OracleReport& r, double alpha) {
  nlohmann::ordered_json doc;
  doc["alpha"] = alpha;
  doc["feasible"] = r.feasible;
  doc["paths_enumerated"] = r.paths_enumerated;
  doc["best_path"] = r.best_path;
  doc["best_objective"] = r.best_objective;
  doc["min_total_time"] = r.min_total_time;
  doc["astar_found"] = r.astar_found;
  doc["astar_path"] = r.astar_path;
  doc["astar_objective"] = r.astar_objective;
  doc["astar_total_time"] = r.astar_total_time;
  doc["gap"] = r.gap;
  return doc.dump(2);
}

// ---------------------------------------------------------------------------

bool AccuracyRecord::is_valid_score(double s) {
  static constexpr double kAllowed[] = {0.0, 0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 1.0};
  return std::any_of(std::begin(kAllowed), std::end(kAllowed),
                     [s](double a) { return std::abs(a - s) <= 1e-12; });
}

AccuracyRecord::AccuracyRecord(std::vector<double> scores) : scores_(std::move(scores)) {
  for (double s : scores_) {
    if (!is_valid_score(s)) throw Error(ErrorCode::InvalidScore, "score " + std::to_string(s));
  }
}

double task_accuracy(const AccuracyRecord& record) {
  const auto& s = record.scores();
  if (s.empty()) throw Error(ErrorCode::EmptyRecord, "task has no subtask scores");
  double sum = 0.0;
  for (double v : s) sum += v;
  return sum / static_cast<double>(s.size());
}

double overall_accuracy(std::span<const double> task_scores) {
  if (task_scores.empty()) throw Error(ErrorCode::EmptyRecord, "no task scores");
  double sum = 0.0;
  for (double v : task_scores) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidScore, "task score " + std::to_string(v));
    sum += v;
  }
  return sum / static_cast<double>(task_scores.size());
}

// ---------------------------------------------------------------------------

bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
  return a.total_time <= b.total_time && a.quality_product >= b.quality_product &&
         (a.total_time < b.total_time || a.quality_product > b.quality_product);
}

std::vector<bool> pareto_flags(std::span<const ParetoPoint> points) {
  std::vector<bool> keep(points.size(), true);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < points.size() && keep[i]; ++j) {
      if (i != j && dominates(points[j], points[i])) keep[i] = false;
    }
  }
  return keep;
}

std::vector<ParetoPoint> pareto_filter(std::span<const ParetoPoint> points) {
  const auto keep = pareto_flags(points);
  std::vector<ParetoPoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (keep[i]) out.push_back(points[i]);
  }
  return out;
}

std::vector<ParetoPoint> sweep_alpha(const ToolSubgraph& g, const BenchmarkTable& bt,
                                     const SimulatorSpec& sim, std::span<const double> alphas,
                                     const SearchConfig& base) {
  const auto costs = benchmark_costs(g, bt);
  std::vector<std::future<ParetoPoint>> runs;
  for (double a : alphas) {
    const Alpha alpha(a);
    runs.push_back(std::async(std::launch::async, [&, alpha] {
      SearchConfig cfg = base;
      cfg.alpha = alpha;
      const SimulatedExecutor exec(sim, bt, cfg.seed);
      const auto h = precompute_heuristics(g, costs, alpha);
      const PlanResult r = astar_search(g, h, exec, cfg);
      if (r.status != SearchStatus::Found) {
        throw Error(ErrorCode::SearchExhausted, "no path found at alpha " + fmt9(alpha.value()));
      }
      return ParetoPoint{alpha.value(), r.path.cum_time, r.path.cum_quality, r.path.g};
    }));
  }
  std::vector<ParetoPoint> out;
  out.reserve(runs.size());
  for (auto& r : runs) out.push_back(r.get());
  return out;
}

std::string pareto_csv(std::span<const ParetoPoint> points, bool with_flags) {
  std::string out = "alpha,total_time,quality_product,g_final";
  out += with_flags ? ",non_dominated\n" : "\n";
  const auto flags = pareto_flags(points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    out += fmt9(p.alpha) + "," + fmt9(p.total_time) + "," + fmt9(p.quality_product) + "," + fmt9(p.g_final);
    if (with_flags) out += flags[i] ? ",1" : ",0";
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

RandomInstance make_random_instance(std::uint64_t seed, const RandomInstanceOptions& options) {
  if (options.max_nodes < 2) throw Error(ErrorCode::InvalidArgument, "random instance needs >= 2 nodes");
  std::mt19937_64 rng(seed);
  auto uniform_int = [&rng](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const auto& kinds = Vocabulary::plannable();
  const std::size_t n = uniform_int(2, options.max_nodes);

  // Fan-in shrinks until the path count fits under the cap; fan-in 1 is a
  // tree with at most n - 1 paths.
  for (std::size_t fan_in = 3;; --fan_in) {
    ToolSubgraph g;
    std::vector<BenchmarkRow> rows;
    for (std::size_t j = 1; j < n; ++j) {
      PlanNode node;
      node.role = NodeRole::Candidate;
      char name[32];
      std::snprintf(name, sizeof name, "tool_%02zu", j);
      node.tool = ToolId(name);
      node.task = kinds[uniform_int(0, kinds.size() - 1)];
      node.instance = j;
      const NodeId id = g.add_node(node);

      const std::size_t k = uniform_int(1, std::min(j, fan_in));
      std::vector<NodeId> pool(j);
      for (NodeId v = 0; v < j; ++v) pool[v] = v;
      std::shuffle(pool.begin(), pool.end(), rng);
      for (std::size_t i = 0; i < k; ++i) g.add_edge(pool[i], id);

      const double log_time = std::uniform_real_distribution<double>(std::log(0.001), std::log(15.0))(rng);
      const double quality =
          options.unit_quality ? 1.0 : std::uniform_real_distribution<double>(options.min_quality, 1.0)(rng);
      rows.push_back(BenchmarkRow{node.tool, node.task, std::exp(log_time), quality});
    }
    if (fan_in == 1 || count_paths(g) <= options.max_paths) {
      // Unused unit-quality rows keep per-kind normalization from rescaling the draws.
      std::set<SubtaskKind> used;
      for (const auto& r : rows) used.insert(r.subtask);
      for (const auto& kind : used) rows.push_back(BenchmarkRow{ToolId("reference"), kind, 1.0, 1.0});
      RandomInstance inst{std::move(g), BenchmarkTable(rows)};
      if (options.unit_quality) {
        for (const auto& [key, e] : inst.bt.entries()) {
          (void)key;
          if (e.quality_norm != 1.0) throw Error(ErrorCode::InvalidArgument, "unit quality broken");
        }
      }
      return inst;
    }
  }
}

std::vector<VerifyRow> verify_random_instances(std::size_t count, std::uint64_t seed,
                                               std::span<const double> alphas,
                                               const RandomInstanceOptions& instance_options,
                                               const OracleOptions& oracle_options) {
  std::vector<VerifyRow> rows;
  for (std::size_t i = 0; i < count; ++i) {
    RandomInstanceOptions opts = instance_options;
    opts.unit_quality = instance_options.unit_quality || (i % 2 == 0);
    const std::uint64_t inst_seed = seed + i;
    const RandomInstance inst = make_random_instance(inst_seed, opts);
    for (double a : alphas) {
      VerifyRow row;
      row.instance = i;
      row.seed = inst_seed;
      row.alpha = a;
      row.unit_quality = opts.unit_quality;
      row.report = brute_force_optimal(inst.graph, inst.bt, Alpha(a), oracle_options);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string verify_csv(std::span<const VerifyRow> rows) {
  std::string out =
      "instance,seed,alpha,unit_quality,paths,best_objective,astar_objective,gap,min_total_time,"
      "astar_total_time\n";
  for (const auto& r : rows) {
    out += std::to_string(r.instance) + "," + std::to_string(r.seed) + "," + fmt9(r.alpha) + "," +
           (r.unit_quality ? "1" : "0") + "," + std::to_string(r.report.paths_enumerated) + "," +
           fmt9(r.report.best_objective) + "," + fmt9(r.report.astar_objective) + "," +
           fmt9(r.report.gap) + "," + fmt9(r.report.min_total_time) + "," +
           fmt9(r.report.astar_total_time) + "\n";
  }
  return out;
}

}  // namespace costa

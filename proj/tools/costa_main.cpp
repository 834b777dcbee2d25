#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "costa/error.hpp"
#include "costa/executor.hpp"
#include "costa/oracle.hpp"
#include "costa/planner.hpp"
#include "costa/registry.hpp"
#include "costa/search.hpp"
#include "costa/subtask_tree.hpp"
#include "costa/toolgraph.hpp"

#ifndef COSTA_VERSION
#define COSTA_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace costa;

namespace {

enum ExitCode : int { kOk = 0, kInputError = 1, kExhausted = 2, kPathExplosion = 3 };

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

void emit(const std::optional<std::string>& path, const std::string& text) {
  if (path) {
    write_file(*path, text);
  } else {
    std::cout << text;
  }
}

std::string sibling(const std::string& out, std::string_view suffix) {
  fs::path p(out);
  return (p.parent_path() / (p.stem().string() + std::string(suffix))).string();
}

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad alpha '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "bad alpha '" + item + "'");
    }
    out.push_back(Alpha(v).value());
  }
  return out;
}

struct Manifest {
  std::vector<std::string> argv;
  ordered_json config;
  ordered_json inputs = ordered_json::object();

  void add_input(const std::string& label, const std::string& path) {
    inputs[label] = {{"path", path}, {"sha256", sha256_hex(read_text_file(path))}};
  }

  std::string to_json() const {
    ordered_json doc;
    std::string cmd;
    for (const auto& a : argv) cmd += (cmd.empty() ? "" : " ") + a;
    doc["command_line"] = cmd;
    ordered_json hashed = config;
    hashed["inputs"] = inputs;
    doc["config_hash"] = sha256_hex(hashed.dump());
    doc["config"] = config;
    doc["inputs"] = inputs;
    doc["seed"] = config.value("seed", kDefaultSeed);
    doc["versions"] = {{"costa", COSTA_VERSION}, {"compiler", __VERSION__}};
    doc["timestamp"] = utc_timestamp();
    return doc.dump(2) + "\n";
  }
};

// Flags shared by plan, sweep and verify.
struct PipelineArgs {
  std::string mdt;
  std::string benchmark;
  std::string tree;
  std::string task;
  std::string planner_endpoint;
  double quality_threshold = 0.8;
  int max_retries = 3;
  std::string sim = "deterministic";
  std::uint64_t seed = kDefaultSeed;
  std::size_t queue_cap = 100'000;
};

void add_pipeline_flags(CLI::App* cmd, PipelineArgs& a, bool with_planner) {
  cmd->add_option("--mdt", a.mdt, "Model description table JSON")->check(CLI::ExistingFile);
  cmd->add_option("--benchmark", a.benchmark, "Benchmark table JSON")->check(CLI::ExistingFile);
  cmd->add_option("--tree", a.tree, "Subtask tree JSON")->check(CLI::ExistingFile);
  if (with_planner) {
    cmd->add_option("--task", a.task, "Task text sent to the planner endpoint instead of --tree");
    cmd->add_option("--planner-endpoint", a.planner_endpoint,
                    std::string("Planner URL (default: $") + std::string(kPlannerUrlEnv) + ")");
  }
  cmd->add_option("--quality-threshold", a.quality_threshold, "Minimum accepted node quality")
      ->capture_default_str();
  cmd->add_option("--max-retries", a.max_retries, "Retries after a failed attempt")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--sim", a.sim, "deterministic | stochastic | path to a simulator spec JSON")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Simulation seed")->capture_default_str();
  cmd->add_option("--queue-cap", a.queue_cap, "Maximum priority queue size")->capture_default_str();
}

struct Pipeline {
  ModelDescriptionTable mdt{{}};
  BenchmarkTable bt;
  SubtaskTree tree;
  ToolSubgraph graph;
  SimulatorSpec sim;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Pipeline load_pipeline(const PipelineArgs& a, Manifest& manifest) {
  if (a.mdt.empty()) throw UsageError("--mdt is required");
  if (a.benchmark.empty()) throw UsageError("--benchmark is required");
  if (a.tree.empty() && a.task.empty()) throw UsageError("--tree is required");

  Pipeline p;
  p.mdt = load_mdt(a.mdt);
  manifest.add_input("mdt", a.mdt);
  p.bt = load_benchmark(a.benchmark, p.mdt);
  manifest.add_input("benchmark", a.benchmark);
  if (!a.tree.empty()) {
    p.tree = parse_subtask_tree(read_text_file(a.tree));
    manifest.add_input("tree", a.tree);
  } else {
    std::unique_ptr<PlannerClient> client;
    if (!a.planner_endpoint.empty()) {
      client = std::make_unique<HttpPlannerClient>(a.planner_endpoint);
    } else {
      client = planner_client_from_env();
    }
    const std::string reply = request_tree(client.get(), build_planner_prompt(a.task));
    p.tree = parse_subtask_tree(reply);
    manifest.config["planner_reply_sha256"] = sha256_hex(reply);
  }
  p.graph = build_tool_subgraph(p.tree, p.mdt, build_tdg(p.mdt));

  if (a.sim == "deterministic") {
    p.sim.mode = SimulationMode::Deterministic;
  } else if (a.sim == "stochastic") {
    p.sim.mode = SimulationMode::Stochastic;
  } else {
    p.sim = load_simulator_spec(a.sim);
    manifest.add_input("sim", a.sim);
  }
  return p;
}

SearchConfig make_config(const PipelineArgs& a, double alpha) {
  SearchConfig cfg;
  cfg.alpha = Alpha(alpha);
  cfg.quality_threshold = a.quality_threshold;
  cfg.max_retries = a.max_retries;
  cfg.queue_cap = a.queue_cap;
  cfg.seed = a.seed;
  return cfg;
}

ordered_json config_json(const PipelineArgs& a) {
  return {{"quality_threshold", a.quality_threshold}, {"max_retries", a.max_retries}, {"sim", a.sim},
          {"seed", a.seed}, {"queue_cap", a.queue_cap}};
}

// ---------------------------------------------------------------------------

int run_plan(const PipelineArgs& a, double alpha, const std::optional<std::string>& out, Manifest manifest) {
  manifest.config = config_json(a);
  manifest.config["command"] = "plan";
  manifest.config["alpha"] = alpha;
  if (!a.task.empty()) manifest.config["task"] = a.task;
  const Alpha al(alpha);
  Pipeline p = load_pipeline(a, manifest);

  const SearchConfig cfg = make_config(a, alpha);
  const SimulatedExecutor exec(p.sim, p.bt, cfg.seed);
  const auto h = precompute_heuristics(p.graph, p.bt, al);
  const PlanResult result = astar_search(p.graph, h, exec, cfg);

  emit(out, plan_result_to_json(result, p.graph) + "\n");
  if (out) {
    write_file(sibling(*out, ".trace.json"), result.trace.to_json() + "\n");
    write_file(sibling(*out, ".manifest.json"), manifest.to_json());
  }
  if (result.status != SearchStatus::Found) {
    std::cerr << "costa: search exhausted without reaching a leaf\n";
    return kExhausted;
  }
  return kOk;
}

int run_sweep(const PipelineArgs& a, const std::string& alphas_text, const std::optional<std::string>& csv,
              Manifest manifest) {
  const auto alphas = parse_alphas(alphas_text);
  manifest.config = config_json(a);
  manifest.config["command"] = "sweep";
  manifest.config["alphas"] = alphas;
  Pipeline p = load_pipeline(a, manifest);

  const auto points = sweep_alpha(p.graph, p.bt, p.sim, alphas, make_config(a, 1.0));
  emit(csv, pareto_csv(points, true));
  if (csv) write_file(sibling(*csv, ".manifest.json"), manifest.to_json());
  return kOk;
}

struct VerifyArgs {
  std::size_t random = 0;
  std::string alphas = "1";
  std::size_t paths_cap = kDefaultPathCap;
  double tolerance = 0.0;
  bool unit_quality = false;
  std::size_t max_nodes = 12;
  std::uint64_t max_paths = 10'000;
  std::optional<std::string> csv;
  std::optional<std::string> out;
};

bool unit_quality_graph(const ToolSubgraph& g, const BenchmarkTable& bt) {
  const auto costs = benchmark_costs(g, bt);
  return std::all_of(costs.begin(), costs.end(), [](const NodeCost& c) { return c.quality == 1.0; });
}

int run_verify(const PipelineArgs& a, const VerifyArgs& v, Manifest manifest) {
  const auto alphas = parse_alphas(v.alphas);
  manifest.config = config_json(a);
  manifest.config["command"] = "verify";
  manifest.config["alphas"] = alphas;
  manifest.config["paths_cap"] = v.paths_cap;
  manifest.config["tolerance"] = v.tolerance;

  OracleOptions opts;
  opts.quality_threshold = a.quality_threshold;
  opts.max_retries = a.max_retries;
  opts.path_cap = v.paths_cap;

  std::vector<VerifyRow> rows;
  if (v.random > 0) {
    manifest.config["random"] = v.random;
    manifest.config["unit_quality"] = v.unit_quality;
    manifest.config["max_nodes"] = v.max_nodes;
    manifest.config["max_paths"] = v.max_paths;
    RandomInstanceOptions ropts;
    ropts.max_nodes = v.max_nodes;
    ropts.max_paths = v.max_paths;
    ropts.unit_quality = v.unit_quality;
    rows = verify_random_instances(v.random, a.seed, alphas, ropts, opts);
  } else {
    Pipeline p = load_pipeline(a, manifest);
    const bool unit = unit_quality_graph(p.graph, p.bt);
    for (double alpha : alphas) {
      VerifyRow row;
      row.seed = a.seed;
      row.alpha = alpha;
      row.unit_quality = unit;
      row.report = brute_force_optimal(p.graph, p.bt, Alpha(alpha), opts);
      rows.push_back(std::move(row));
    }
  }

  std::size_t corner_runs = 0, corner_violations = 0, negative = 0, not_found = 0, nonzero = 0;
  double max_gap = 0.0, corner_max_gap = 0.0;
  for (const auto& r : rows) {
    const auto& rep = r.report;
    if (rep.feasible && !rep.astar_found) ++not_found;
    if (rep.gap < 0.0) ++negative;
    if (rep.gap > 0.0) ++nonzero;
    max_gap = std::max(max_gap, rep.gap);
    if (r.alpha == 1.0 && r.unit_quality) {
      ++corner_runs;
      corner_max_gap = std::max(corner_max_gap, rep.gap);
      if (rep.gap > v.tolerance) ++corner_violations;
    }
  }

  ordered_json doc;
  doc["runs"] = rows.size();
  doc["alphas"] = alphas;
  doc["max_gap"] = max_gap;
  doc["nonzero_gaps"] = nonzero;
  doc["negative_gaps"] = negative;
  doc["astar_not_found"] = not_found;
  doc["corner_runs"] = corner_runs;
  doc["corner_max_gap"] = corner_max_gap;
  doc["corner_violations"] = corner_violations;
  doc["tolerance"] = v.tolerance;
  if (v.random == 0) {
    doc["reports"] = ordered_json::array();
    for (const auto& r : rows) doc["reports"].push_back(ordered_json::parse(oracle_report_to_json(r.report, r.alpha)));
  }
  emit(v.out, doc.dump(2) + "\n");
  if (v.csv) write_file(*v.csv, verify_csv(rows));
  if (v.out) write_file(sibling(*v.out, ".manifest.json"), manifest.to_json());

  const bool ok = corner_violations == 0 && negative == 0 && not_found == 0;
  if (!ok) std::cerr << "costa: oracle gap check failed\n";
  return ok ? kOk : kExhausted;
}

int run_graph(const std::string& mdt_path, const std::string& tree_path, const std::string& format,
              const std::optional<std::string>& out) {
  const auto mdt = load_mdt(mdt_path);
  const auto tdg = build_tdg(mdt);
  std::string text;
  if (tree_path.empty()) {
    text = format == "json" ? tdg_to_json(tdg) : tdg_to_dot(tdg);
  } else {
    const auto tree = parse_subtask_tree(read_text_file(tree_path));
    const auto g = build_tool_subgraph(tree, mdt, tdg);
    text = format == "json" ? subgraph_to_json(g) : subgraph_to_dot(g);
  }
  if (text.empty() || text.back() != '\n') text += "\n";
  emit(out, text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-sensitive toolpath planning over a model description table"};
  app.require_subcommand(1);

  Manifest manifest;
  manifest.argv.assign(argv, argv + argc);

  PipelineArgs plan_args;
  double plan_alpha = 1.0;
  std::string plan_out;
  auto* plan = app.add_subcommand("plan", "Search the tool subgraph for one alpha");
  add_pipeline_flags(plan, plan_args, true);
  plan->add_option("--alpha", plan_alpha, "Cost/quality exponent in [0, 2]")->capture_default_str();
  plan->add_option("--out", plan_out, "Plan JSON path; trace and manifest are written beside it");

  PipelineArgs sweep_args;
  std::string sweep_alphas = "0,0.5,1,1.5,2";
  std::string sweep_csv;
  auto* sweep = app.add_subcommand("sweep", "Plan once per alpha and report the Pareto front");
  add_pipeline_flags(sweep, sweep_args, true);
  sweep->add_option("--alphas", sweep_alphas, "Comma-separated alphas")->capture_default_str();
  sweep->add_option("--csv", sweep_csv, "CSV output path");

  PipelineArgs verify_args;
  VerifyArgs vargs;
  std::string verify_csv_path, verify_out;
  auto* verify = app.add_subcommand("verify", "Compare A* against exhaustive enumeration");
  add_pipeline_flags(verify, verify_args, false);
  verify->add_option("--random", vargs.random, "Number of seeded random instances instead of input files");
  verify->add_option("--alphas", vargs.alphas, "Comma-separated alphas")->capture_default_str();
  verify->add_option("--paths-cap", vargs.paths_cap, "Maximum enumerated paths")->capture_default_str();
  verify->add_option("--tolerance", vargs.tolerance, "Allowed gap on alpha=1 unit-quality runs")
      ->capture_default_str();
  verify->add_flag("--unit-quality", vargs.unit_quality, "Give every random instance unit quality");
  verify->add_option("--max-nodes", vargs.max_nodes, "Random instance size")->capture_default_str();
  verify->add_option("--max-paths", vargs.max_paths, "Random instance path budget")->capture_default_str();
  verify->add_option("--csv", verify_csv_path, "Per-run gap CSV");
  verify->add_option("--out", verify_out, "Summary JSON path");

  std::string graph_mdt, graph_tree, graph_format = "dot", graph_out;
  auto* graph = app.add_subcommand("graph", "Export the tool dependency graph or a tool subgraph");
  graph->add_option("--mdt", graph_mdt, "Model description table JSON")->required()->check(CLI::ExistingFile);
  graph->add_option("--tree", graph_tree, "Subtask tree JSON")->check(CLI::ExistingFile);
  graph->add_option("--format", graph_format, "dot | json")
      ->capture_default_str()
      ->check(CLI::IsMember({"dot", "json"}));
  graph->add_option("--out", graph_out, "Output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<std::string>(s); };
  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == plan) return run_plan(plan_args, plan_alpha, opt(plan_out), manifest);
    if (active == sweep) return run_sweep(sweep_args, sweep_alphas, opt(sweep_csv), manifest);
    if (active == verify) {
      vargs.csv = opt(verify_csv_path);
      vargs.out = opt(verify_out);
      return run_verify(verify_args, vargs, manifest);
    }
    return run_graph(graph_mdt, graph_tree, graph_format, opt(graph_out));
  } catch (const UsageError& e) {
    std::cerr << "costa " << active->get_name() << ": " << e.what() << "\n\n" << active->help();
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "costa: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::PathExplosion:
        return kPathExplosion;
      case ErrorCode::SearchExhausted:
      case ErrorCode::QueueOverflow:
        return kExhausted;
      default:
        return kInputError;
    }
  } catch (const std::exception& e) {
    std::cerr << "costa: " << e.what() << "\n";
    return kInputError;
  }
}

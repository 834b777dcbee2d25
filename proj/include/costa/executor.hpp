#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "costa/registry.hpp"
#include "costa/toolgraph.hpp"

namespace costa {

struct ExecutionOutcome {
  double time_seconds = 0.0;  // c(v, s)
  double quality = 1.0;       // q(v, s), in [0, 1]
  int attempt = 1;
};

enum class SimulationMode { Deterministic, Stochastic, Scripted };

/// A scripted outcome for one (tool, subtask) row. attempt == 0 matches any
/// attempt that has no exact entry.
struct ScriptEntry {
  ToolId tool;
  SubtaskKind subtask;
  int attempt = 0;
  double time_seconds = 0.0;
  double quality = 1.0;
};

struct SimulatorSpec {
  SimulationMode mode = SimulationMode::Deterministic;
  double time_noise_sigma = 0.1;     // lognormal sigma on time
  double quality_noise_sigma = 0.05; // gaussian sigma on quality, clamped to [0, 1]
  std::vector<ScriptEntry> script;
};

SimulatorSpec parse_simulator_spec(std::string_view json_text);
SimulatorSpec load_simulator_spec(const std::string& path);
std::string_view to_string(SimulationMode mode);

/// Simulates one invocation of a node. ROOT always yields (0, 1).
/// Stochastic draws come from a generator keyed by (seed, node id, attempt),
/// so the result does not depend on the order of calls.
/// Throws MissingBenchmark or ScriptGap.
ExecutionOutcome execute(const SimulatorSpec& spec, const BenchmarkTable& bt, const PlanNode& node,
                         int attempt, std::uint64_t seed);

/// Pass iff quality >= threshold.
inline bool validate_quality(const ExecutionOutcome& outcome, double threshold) {
  return outcome.quality >= threshold;
}

class Executor {
 public:
  virtual ~Executor() = default;
  virtual ExecutionOutcome run(const PlanNode& node, int attempt) const = 0;
};

/// Stateless adapter binding a spec, a benchmark table and a seed.
class SimulatedExecutor : public Executor {
 public:
  SimulatedExecutor(SimulatorSpec spec, const BenchmarkTable& bt, std::uint64_t seed)
      : spec_(std::move(spec)), bt_(&bt), seed_(seed) {}

  ExecutionOutcome run(const PlanNode& node, int attempt) const override {
    return execute(spec_, *bt_, node, attempt, seed_);
  }

  const SimulatorSpec& spec() const noexcept { return spec_; }

 private:
  SimulatorSpec spec_;
  const BenchmarkTable* bt_;
  std::uint64_t seed_;
};

}  // namespace costa

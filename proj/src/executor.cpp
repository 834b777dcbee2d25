#include "costa/executor.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "costa/error.hpp"

namespace costa {

std::string_view to_string(SimulationMode mode) {
  switch (mode) {
    case SimulationMode::Deterministic: return "deterministic";
    case SimulationMode::Stochastic: return "stochastic";
    case SimulationMode::Scripted: return "scripted";
  }
  return "unknown";
}

SimulatorSpec parse_simulator_spec(std::string_view json_text) {
  using nlohmann::json;
  SimulatorSpec spec;
  try {
    const json doc = json::parse(json_text);
    const auto mode = doc.at("mode").get<std::string>();
    if (mode == "deterministic") {
      spec.mode = SimulationMode::Deterministic;
    } else if (mode == "stochastic") {
      spec.mode = SimulationMode::Stochastic;
    } else if (mode == "scripted") {
      spec.mode = SimulationMode::Scripted;
    } else {
      throw Error(ErrorCode::ParseError, "simulator: unknown mode '" + mode + "'");
    }
    spec.time_noise_sigma = doc.value("time_noise_sigma", spec.time_noise_sigma);
    spec.quality_noise_sigma = doc.value("quality_noise_sigma", spec.quality_noise_sigma);
    if (spec.time_noise_sigma < 0 || spec.quality_noise_sigma < 0) {
      throw Error(ErrorCode::ParseError, "simulator: noise sigmas must be non-negative");
    }
    if (doc.contains("script")) {
      for (const auto& row : doc.at("script")) {
        ScriptEntry e;
        e.tool = ToolId(row.at("tool").get<std::string>());
        e.subtask = parse_subtask_kind(row.at("subtask").get<std::string>());
        e.attempt = row.value("attempt", 0);
        e.time_seconds = row.at("time").get<double>();
        e.quality = row.at("quality").get<double>();
        if (e.time_seconds < 0 || e.quality < 0 || e.quality > 1 || e.attempt < 0) {
          throw Error(ErrorCode::ParseError, "simulator: script value out of range for " + e.tool.name());
        }
        spec.script.push_back(std::move(e));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("simulator: ") + e.what());
  }
  return spec;
}

SimulatorSpec load_simulator_spec(const std::string& path) {
  return parse_simulator_spec(read_text_file(path));
}

ExecutionOutcome execute(const SimulatorSpec& spec, const BenchmarkTable& bt, const PlanNode& node,
                         int attempt, std::uint64_t seed) {
  if (node.is_root()) return ExecutionOutcome{0.0, 1.0, attempt};

  if (spec.mode == SimulationMode::Scripted) {
    const ScriptEntry* wildcard = nullptr;
    for (const auto& e : spec.script) {
      if (e.tool != node.tool || e.subtask != node.task) continue;
      if (e.attempt == attempt) return ExecutionOutcome{e.time_seconds, e.quality, attempt};
      if (e.attempt == 0 && !wildcard) wildcard = &e;
    }
    if (wildcard) return ExecutionOutcome{wildcard->time_seconds, wildcard->quality, attempt};
    throw Error(ErrorCode::ScriptGap, "no scripted outcome for " + node.describe() +
                                          " attempt " + std::to_string(attempt));
  }

  const BenchmarkEntry& anchor = bt.at(node.tool, node.task);
  if (spec.mode == SimulationMode::Deterministic) {
    return ExecutionOutcome{anchor.time_seconds, anchor.quality_norm, attempt};
  }

  std::seed_seq key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(node.id), static_cast<std::uint32_t>(attempt)};
  std::mt19937_64 rng(key);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double z_time = unit(rng);
  const double z_quality = unit(rng);
  const double time = anchor.time_seconds * std::exp(spec.time_noise_sigma * z_time);
  const double quality =
      std::clamp(anchor.quality_norm + spec.quality_noise_sigma * z_quality, 0.0, 1.0);
  return ExecutionOutcome{time, quality, attempt};
}

}  // namespace costa

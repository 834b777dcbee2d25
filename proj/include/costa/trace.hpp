#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "costa/toolgraph.hpp"

namespace costa {

enum class Decision {
  Accepted,  // met the quality threshold
  Retry,     // below threshold, another attempt follows
  Dropped,   // below threshold with no attempts left
};

std::string_view to_string(Decision d);

struct TraceEvent {
  NodeId node = 0;
  std::string tool;
  std::string subtask;
  int attempt = 1;
  double time_seconds = 0.0;
  double quality = 1.0;
  Decision decision = Decision::Accepted;
  // Set on the accepting event: the path objective after this node, and for
  // retried nodes also the literal g_new + g_retry sum.
  std::optional<double> g_path;
  std::optional<double> g_literal;
};

class ExecutionTrace {
 public:
  void append(TraceEvent event);

  /// Attaches objective values to the most recent event.
  void annotate_last(double g_path, std::optional<double> g_literal);

  const std::vector<TraceEvent>& events() const noexcept { return events_; }
  bool empty() const noexcept { return events_.empty(); }

  /// Sum of every attempt's time, failed attempts included.
  double total_time() const noexcept { return total_time_; }

  std::size_t attempts(NodeId node) const;
  bool retried(NodeId node) const;
  std::size_t nodes_executed() const;
  std::size_t nodes_retried() const;

  std::string to_json() const;

 private:
  std::vector<TraceEvent> events_;
  double total_time_ = 0.0;
};

ExecutionTrace record_trace(std::span<const TraceEvent> events);

}  // namespace costa

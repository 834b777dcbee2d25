#include "costa/trace.hpp"

#include <map>
#include <set>

#include <json.hpp>

namespace costa {

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Accepted: return "accepted";
    case Decision::Retry: return "retry";
    case Decision::Dropped: return "dropped";
  }
  return "unknown";
}

void ExecutionTrace::append(TraceEvent event) {
  total_time_ += event.time_seconds;
  events_.push_back(std::move(event));
}

void ExecutionTrace::annotate_last(double g_path, std::optional<double> g_literal) {
  if (events_.empty()) return;
  events_.back().g_path = g_path;
  events_.back().g_literal = g_literal;
}

std::size_t ExecutionTrace::attempts(NodeId node) const {
  std::size_t n = 0;
  for (const auto& e : events_) n += (e.node == node);
  return n;
}

bool ExecutionTrace::retried(NodeId node) const {
  for (const auto& e : events_) {
    if (e.node == node && e.attempt > 1) return true;
  }
  return false;
}

std::size_t ExecutionTrace::nodes_executed() const {
  std::set<NodeId> s;
  for (const auto& e : events_) s.insert(e.node);
  return s.size();
}

std::size_t ExecutionTrace::nodes_retried() const {
  std::set<NodeId> s;
  for (const auto& e : events_) {
    if (e.attempt > 1) s.insert(e.node);
  }
  return s.size();
}

std::string ExecutionTrace::to_json() const {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["events"] = ojson::array();
  for (const auto& e : events_) {
    ojson j;
    j["node"] = e.node;
    j["tool"] = e.tool;
    j["subtask"] = e.subtask;
    j["attempt"] = e.attempt;
    j["time"] = e.time_seconds;
    j["quality"] = e.quality;
    j["decision"] = to_string(e.decision);
    if (e.g_path) j["g_path"] = *e.g_path;
    if (e.g_literal) j["g_literal"] = *e.g_literal;
    doc["events"].push_back(std::move(j));
  }
  doc["totals"] = {{"time", total_time_},
                   {"events", events_.size()},
                   {"nodes_executed", nodes_executed()},
                   {"nodes_retried", nodes_retried()}};
  return doc.dump(2);
}

ExecutionTrace record_trace(std::span<const TraceEvent> events) {
  ExecutionTrace trace;
  for (const auto& e : events) trace.append(e);
  return trace;
}

}  // namespace costa

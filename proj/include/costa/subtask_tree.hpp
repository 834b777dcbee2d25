#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "costa/registry.hpp"

namespace costa {

struct SubtaskInstance {
  SubtaskKind kind;
  std::string argument;  // object/detail label, may be empty
  int ordinal = 0;       // > 0

  /// Renders the planner label grammar: `Kind (Argument)(N)`.
  std::string label() const;

  bool operator==(const SubtaskInstance&) const = default;
};

/// Subtask DAG as emitted by the planner. Indices into `nodes` identify
/// instances; `parents[i]` lists the instances node i depends on.
struct SubtaskTree {
  std::string task_text;
  std::vector<SubtaskInstance> nodes;
  std::vector<std::vector<std::size_t>> parents;

  std::size_t size() const noexcept { return nodes.size(); }
  std::vector<std::size_t> roots() const;
  std::vector<std::size_t> leaves() const;
  std::vector<std::vector<std::size_t>> children() const;

  /// Kahn order, ties by ascending index. Throws Error{CycleDetected}.
  std::vector<std::size_t> topological_order() const;

  /// Every root-to-leaf chain, in lexicographic index order.
  std::vector<std::vector<std::size_t>> chains() const;
};

/// Splits a label into (kind, argument, ordinal). A missing ordinal is
/// returned as 0; a missing argument as "".
SubtaskInstance parse_subtask_label(std::string_view label);

/// Parses `{"task": str, "subtask_tree": [{"subtask": str, "parent": [str]}]}`.
/// Throws ParseError, UnknownSubtask, DuplicateEntry, DanglingParent,
/// CycleDetected.
SubtaskTree parse_subtask_tree(std::string_view json_text);

std::string serialize_subtask_tree(const SubtaskTree& tree);

}  // namespace costa

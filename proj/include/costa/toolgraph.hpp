#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "costa/dag.hpp"
#include "costa/registry.hpp"
#include "costa/subtask_tree.hpp"

namespace costa {

// ---------------------------------------------------------------------------
// Tool Dependency Graph
// ---------------------------------------------------------------------------

struct ToolDependencyGraph {
  std::vector<ToolId> nodes;                    // ascending
  std::set<std::pair<ToolId, ToolId>> edges;    // (producer, consumer)

  bool has_edge(const ToolId& from, const ToolId& to) const {
    return edges.count({from, to}) > 0;
  }
};

/// Edge (a, b) iff some output of a matches some input of b; no self edges.
ToolDependencyGraph build_tdg(const ModelDescriptionTable& mdt);

std::string tdg_to_dot(const ToolDependencyGraph& tdg);
std::string tdg_to_json(const ToolDependencyGraph& tdg);

// ---------------------------------------------------------------------------
// Tool Subgraph
// ---------------------------------------------------------------------------

using NodeId = std::size_t;

enum class NodeRole {
  Root,
  Candidate,     // one of M(kind) for the instance it serves
  Prerequisite,  // producer spliced in ahead of a candidate
};

struct PlanNode {
  NodeId id = 0;
  NodeRole role = NodeRole::Root;
  ToolId tool;
  SubtaskKind task;  // the (tool, task) benchmark row this node executes
  std::optional<SubtaskInstance> serves;
  std::size_t instance = 0;  // index into the subtask tree; meaningless for ROOT

  bool is_root() const noexcept { return role == NodeRole::Root; }
  std::string describe() const;
};

class ToolSubgraph {
 public:
  static constexpr NodeId kRoot = 0;

  /// Creates the graph holding only the virtual ROOT node.
  ToolSubgraph();

  NodeId add_node(PlanNode node);
  /// Idempotent; successor lists stay sorted.
  void add_edge(NodeId from, NodeId to);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<PlanNode>& nodes() const noexcept { return nodes_; }
  const PlanNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<NodeId>& successors(NodeId id) const { return succ_.at(id); }
  const std::vector<NodeId>& predecessors(NodeId id) const { return pred_.at(id); }
  const Adjacency& adjacency() const noexcept { return succ_; }

  std::size_t edge_count() const noexcept { return edge_count_; }
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  bool is_leaf(NodeId id) const { return succ_.at(id).empty(); }
  std::vector<NodeId> leaves() const;

  /// Resources ROOT makes available.
  static ResourceSet root_outputs() { return {input_image_resource()}; }

 private:
  std::vector<PlanNode> nodes_;
  Adjacency succ_;
  Adjacency pred_;
  std::size_t edge_count_ = 0;
};

/// Throws Error{CycleDetected} listing one cycle.
void validate_dag(const ToolSubgraph& g);
void validate_dag(const SubtaskTree& tree);

inline constexpr std::size_t kDefaultPathCap = 1'000'000;

/// All ROOT-to-leaf paths, lexicographic by node id. Throws
/// Error{PathExplosion} once more than `cap` paths exist.
std::vector<std::vector<NodeId>> enumerate_paths(const ToolSubgraph& g,
                                                 std::size_t cap = kDefaultPathCap);

/// ROOT-to-leaf path count by dynamic programming, saturating at UINT64_MAX.
std::uint64_t count_paths(const ToolSubgraph& g);

/// Shortest sequence of MDT rows that, applied in order from `available`,
/// makes every resource in `required` available. Ties go to the
/// lexicographically smallest (tool, subtask) sequence. Only tools in
/// `allowed` are considered when it is non-null.
std::optional<std::vector<const MdtEntry*>> find_producer_chain(
    const ModelDescriptionTable& mdt, const ResourceSet& available, const ResourceSet& required,
    const std::set<ToolId>* allowed = nullptr);

/// Expands every subtask instance into its candidate tools plus the
/// prerequisite chains they need, then wires consecutive instances with
/// complete bipartite edges (candidate terminals -> next entries).
/// Throws NoToolForSubtask, UnsatisfiableDependency, CycleDetected.
ToolSubgraph build_tool_subgraph(const SubtaskTree& tree, const ModelDescriptionTable& mdt,
                                 const ToolDependencyGraph& tdg);

/// The MDT row a node executes; nullptr for ROOT or rows the MDT lacks.
const MdtEntry* row_of(const ModelDescriptionTable& mdt, const PlanNode& node);

std::string subgraph_to_json(const ToolSubgraph& g);
std::string subgraph_to_dot(const ToolSubgraph& g);

}  // namespace costa

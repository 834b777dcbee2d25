#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace costa {

using Adjacency = std::vector<std::vector<std::size_t>>;

/// Returns one directed cycle as a vertex sequence whose first vertex is
/// repeated at the end, or nullopt for an acyclic graph.
std::optional<std::vector<std::size_t>> find_cycle(const Adjacency& successors);

/// Kahn's algorithm with a min-index ready set, so the order is unique.
/// Throws Error{CycleDetected} listing one cycle.
std::vector<std::size_t> topological_order(const Adjacency& successors);

}  // namespace costa

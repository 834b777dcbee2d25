#include "costa/dag.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <string>

#include "costa/error.hpp"

namespace costa {

std::optional<std::vector<std::size_t>> find_cycle(const Adjacency& successors) {
  enum class Mark { White, Grey, Black };
  const std::size_t n = successors.size();
  std::vector<Mark> mark(n, Mark::White);
  std::vector<std::size_t> stack;

  // Iterative DFS; `stack` mirrors the grey path so a back edge to a grey
  // vertex yields the cycle directly.
  for (std::size_t start = 0; start < n; ++start) {
    if (mark[start] != Mark::White) continue;
    std::vector<std::pair<std::size_t, std::size_t>> frames{{start, 0}};
    mark[start] = Mark::Grey;
    stack.push_back(start);
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next < successors[v].size()) {
        const std::size_t w = successors[v][next++];
        if (mark[w] == Mark::Grey) {
          std::vector<std::size_t> cycle;
          auto it = std::find(stack.begin(), stack.end(), w);
          cycle.assign(it, stack.end());
          cycle.push_back(w);
          return cycle;
        }
        if (mark[w] == Mark::White) {
          mark[w] = Mark::Grey;
          stack.push_back(w);
          frames.emplace_back(w, 0);
        }
      } else {
        mark[v] = Mark::Black;
        stack.pop_back();
        frames.pop_back();
      }
    }
  }
  return std::nullopt;
}

std::vector<std::size_t> topological_order(const Adjacency& successors) {
  const std::size_t n = successors.size();
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& succ : successors) {
    for (std::size_t w : succ) ++indegree[w];
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (std::size_t w : successors[v]) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  if (order.size() != n) {
    std::string listing;
    if (auto cycle = find_cycle(successors)) {
      for (std::size_t i = 0; i < cycle->size(); ++i) {
        if (i) listing += " -> ";
        listing += std::to_string((*cycle)[i]);
      }
    }
    throw Error(ErrorCode::CycleDetected, listing);
  }
  return order;
}

}  // namespace costa

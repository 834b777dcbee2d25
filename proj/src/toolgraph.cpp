#include "costa/toolgraph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>

#include <json.hpp>

#include "costa/error.hpp"

namespace costa {

namespace {

bool intersects(const ResourceSet& a, const ResourceSet& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      return true;
    }
  }
  return false;
}

bool subset_of(const ResourceSet& a, const ResourceSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

ResourceSet intersection(const ResourceSet& a, const ResourceSet& b) {
  ResourceSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// Tools with a TDG path into `target` (including target itself).
std::set<ToolId> tdg_ancestors(const ToolDependencyGraph& tdg, const ToolId& target) {
  std::set<ToolId> seen{target};
  std::deque<ToolId> work{target};
  while (!work.empty()) {
    const ToolId t = work.front();
    work.pop_front();
    for (const auto& [from, to] : tdg.edges) {
      if (to == t && seen.insert(from).second) work.push_back(from);
    }
  }
  return seen;
}

}  // namespace

// ---------------------------------------------------------------------------
// TDG
// ---------------------------------------------------------------------------

ToolDependencyGraph build_tdg(const ModelDescriptionTable& mdt) {
  ToolDependencyGraph tdg;
  tdg.nodes = mdt.tools();
  for (const auto& producer : tdg.nodes) {
    const ResourceSet outputs = mdt.outputs_of(producer);
    for (const auto& consumer : tdg.nodes) {
      if (producer == consumer) continue;
      if (intersects(outputs, mdt.inputs_of(consumer))) tdg.edges.emplace(producer, consumer);
    }
  }
  return tdg;
}

std::string tdg_to_dot(const ToolDependencyGraph& tdg) {
  std::string out = "digraph tool_dependency_graph {\n  rankdir=LR;\n";
  for (const auto& t : tdg.nodes) out += "  \"" + dot_escape(t.name()) + "\";\n";
  for (const auto& [from, to] : tdg.edges) {
    out += "  \"" + dot_escape(from.name()) + "\" -> \"" + dot_escape(to.name()) + "\";\n";
  }
  out += "}\n";
  return out;
}

std::string tdg_to_json(const ToolDependencyGraph& tdg) {
  nlohmann::ordered_json doc;
  doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& t : tdg.nodes) doc["nodes"].push_back(t.name());
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& [from, to] : tdg.edges) doc["edges"].push_back({from.name(), to.name()});
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// ToolSubgraph
// ---------------------------------------------------------------------------

std::string PlanNode::describe() const {
  if (is_root()) return "ROOT";
  std::string out = tool.name() + " [" + task.name() + "]";
  if (serves) out += " for " + serves->label();
  return out;
}

ToolSubgraph::ToolSubgraph() {
  PlanNode root;
  root.role = NodeRole::Root;
  root.tool = ToolId("ROOT");
  nodes_.push_back(root);
  succ_.emplace_back();
  pred_.emplace_back();
}

NodeId ToolSubgraph::add_node(PlanNode node) {
  node.id = nodes_.size();
  nodes_.push_back(std::move(node));
  succ_.emplace_back();
  pred_.emplace_back();
  return nodes_.back().id;
}

void ToolSubgraph::add_edge(NodeId from, NodeId to) {
  if (from >= size() || to >= size()) {
    throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
  }
  auto& s = succ_[from];
  auto it = std::lower_bound(s.begin(), s.end(), to);
  if (it != s.end() && *it == to) return;
  s.insert(it, to);
  auto& p = pred_[to];
  p.insert(std::lower_bound(p.begin(), p.end(), from), from);
  ++edge_count_;
}

std::vector<std::pair<NodeId, NodeId>> ToolSubgraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count_);
  for (NodeId v = 0; v < size(); ++v) {
    for (NodeId w : succ_[v]) out.emplace_back(v, w);
  }
  return out;
}

std::vector<NodeId> ToolSubgraph::leaves() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < size(); ++v) {
    if (succ_[v].empty()) out.push_back(v);
  }
  return out;
}

void validate_dag(const ToolSubgraph& g) { topological_order(g.adjacency()); }

void validate_dag(const SubtaskTree& tree) { tree.topological_order(); }

std::vector<std::vector<NodeId>> enumerate_paths(const ToolSubgraph& g, std::size_t cap) {
  validate_dag(g);
  std::vector<std::vector<NodeId>> out;
  std::vector<NodeId> path;
  auto walk = [&](auto&& self, NodeId v) -> void {
    path.push_back(v);
    if (g.is_leaf(v)) {
      if (out.size() == cap) {
        throw Error(ErrorCode::PathExplosion, "more than " + std::to_string(cap) + " paths");
      }
      out.push_back(path);
    }
    for (NodeId w : g.successors(v)) self(self, w);
    path.pop_back();
  };
  walk(walk, ToolSubgraph::kRoot);
  return out;
}

std::uint64_t count_paths(const ToolSubgraph& g) {
  const auto order = topological_order(g.adjacency());
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> below(g.size(), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId v = *it;
    if (g.is_leaf(v)) {
      below[v] = 1;
      continue;
    }
    std::uint64_t total = 0;
    for (NodeId w : g.successors(v)) {
      total = (kMax - total < below[w]) ? kMax : total + below[w];
    }
    below[v] = total;
  }
  return below[ToolSubgraph::kRoot];
}

// ---------------------------------------------------------------------------
// Prerequisite chains
// ---------------------------------------------------------------------------

std::optional<std::vector<const MdtEntry*>> find_producer_chain(
    const ModelDescriptionTable& mdt, const ResourceSet& available, const ResourceSet& required,
    const std::set<ToolId>* allowed) {
  ResourceSet missing;
  std::set_difference(required.begin(), required.end(), available.begin(), available.end(),
                      std::inserter(missing, missing.end()));
  if (missing.empty()) return std::vector<const MdtEntry*>{};

  std::vector<const MdtEntry*> rows;
  for (const auto& e : mdt.entries()) {
    if (!allowed || allowed->count(e.tool)) rows.push_back(&e);
  }
  std::sort(rows.begin(), rows.end(), [](const MdtEntry* a, const MdtEntry* b) {
    return std::tie(a->tool, a->subtask) < std::tie(b->tool, b->subtask);
  });

  // Only rows that feed the missing resources, directly or transitively,
  // can appear in a shortest chain.
  ResourceSet relevant = missing;
  std::vector<bool> keep(rows.size(), false);
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (keep[i] || !intersects(rows[i]->outputs, relevant)) continue;
      keep[i] = true;
      grew = true;
      relevant.insert(rows[i]->inputs.begin(), rows[i]->inputs.end());
    }
  }
  std::vector<const MdtEntry*> useful;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (keep[i]) useful.push_back(rows[i]);
  }

  // Breadth-first over sets of available resources. Frontier order equals
  // lexicographic order of the row sequences, so the first goal reached is
  // the lexicographically smallest among the shortest chains.
  struct State {
    ResourceSet have;
    std::vector<const MdtEntry*> chain;
  };
  std::set<ResourceSet> visited{available};
  std::deque<State> frontier{State{available, {}}};
  while (!frontier.empty()) {
    State cur = std::move(frontier.front());
    frontier.pop_front();
    for (const MdtEntry* row : useful) {
      if (!subset_of(row->inputs, cur.have)) continue;
      ResourceSet next = cur.have;
      for (const auto& r : row->outputs) {
        if (relevant.count(r)) next.insert(r);
      }
      if (next.size() == cur.have.size()) continue;
      if (!visited.insert(next).second) continue;
      std::vector<const MdtEntry*> chain = cur.chain;
      chain.push_back(row);
      if (subset_of(required, next)) return chain;
      frontier.push_back(State{std::move(next), std::move(chain)});
    }
  }
  return std::nullopt;
}

const MdtEntry* row_of(const ModelDescriptionTable& mdt, const PlanNode& node) {
  if (node.is_root()) return nullptr;
  return mdt.find(node.tool, node.task);
}

// ---------------------------------------------------------------------------
// Subgraph construction
// ---------------------------------------------------------------------------

ToolSubgraph build_tool_subgraph(const SubtaskTree& tree, const ModelDescriptionTable& mdt,
                                 const ToolDependencyGraph& tdg) {
  const auto order = tree.topological_order();
  const ResourceSet root_avail = ToolSubgraph::root_outputs();

  ToolSubgraph g;
  std::vector<ResourceSet> avail_out(tree.size());
  std::vector<std::vector<NodeId>> entries(tree.size()), terminals(tree.size());

  for (std::size_t s : order) {
    const SubtaskInstance& inst = tree.nodes[s];

    // Resources every incoming path is guaranteed to carry.
    ResourceSet avail_in;
    if (tree.parents[s].empty()) {
      avail_in = root_avail;
    } else {
      avail_in = avail_out[tree.parents[s].front()];
      for (std::size_t p : tree.parents[s]) avail_in = intersection(avail_in, avail_out[p]);
    }

    std::vector<const MdtEntry*> candidates;
    for (const auto& e : mdt.entries()) {
      if (e.subtask == inst.kind) candidates.push_back(&e);
    }
    if (candidates.empty()) {
      throw Error(ErrorCode::NoToolForSubtask, "no tool performs '" + inst.label() + "'");
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const MdtEntry* a, const MdtEntry* b) { return a->tool < b->tool; });

    // Chains sharing a prefix share nodes; keyed by (trie parent, row, role)
    // with kNone standing for "entry of this instance".
    constexpr NodeId kNone = std::numeric_limits<NodeId>::max();
    std::map<std::tuple<NodeId, const MdtEntry*, NodeRole>, NodeId> trie;
    auto child = [&](NodeId parent, const MdtEntry* row, NodeRole role) {
      auto key = std::make_tuple(parent, row, role);
      if (auto it = trie.find(key); it != trie.end()) return it->second;
      PlanNode n;
      n.role = role;
      n.tool = row->tool;
      n.task = row->subtask;
      n.serves = inst;
      n.instance = s;
      const NodeId id = g.add_node(std::move(n));
      trie.emplace(key, id);
      if (parent == kNone) {
        entries[s].push_back(id);
      } else {
        g.add_edge(parent, id);
      }
      return id;
    };

    std::optional<ResourceSet> produced_all;
    for (const MdtEntry* cand : candidates) {
      const auto allowed = tdg_ancestors(tdg, cand->tool);
      auto chain = find_producer_chain(mdt, avail_in, cand->inputs, &allowed);
      if (!chain) {
        throw Error(ErrorCode::UnsatisfiableDependency,
                    cand->tool.name() + " for '" + inst.label() + "' needs inputs no tool chain can produce");
      }
      ResourceSet produced = avail_in;
      NodeId at = kNone;
      for (const MdtEntry* row : *chain) {
        at = child(at, row, NodeRole::Prerequisite);
        produced.insert(row->outputs.begin(), row->outputs.end());
      }
      terminals[s].push_back(child(at, cand, NodeRole::Candidate));
      produced.insert(cand->outputs.begin(), cand->outputs.end());
      produced_all = produced_all ? intersection(*produced_all, produced) : produced;
    }
    avail_out[s] = *produced_all;

    if (tree.parents[s].empty()) {
      for (NodeId e : entries[s]) g.add_edge(ToolSubgraph::kRoot, e);
    } else {
      for (std::size_t p : tree.parents[s]) {
        for (NodeId t : terminals[p]) {
          for (NodeId e : entries[s]) g.add_edge(t, e);
        }
      }
    }
  }
  return g;
}

std::string subgraph_to_json(const ToolSubgraph& g) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["nodes"] = ojson::array();
  for (const auto& n : g.nodes()) {
    ojson j;
    j["id"] = n.id;
    if (n.is_root()) {
      j["tool"] = "ROOT";
      j["subtask"] = nullptr;
      j["argument"] = nullptr;
      j["ordinal"] = nullptr;
      j["role"] = "root";
    } else {
      j["tool"] = n.tool.name();
      j["subtask"] = n.task.name();
      j["argument"] = n.serves ? n.serves->argument : "";
      j["ordinal"] = n.serves ? n.serves->ordinal : 0;
      j["role"] = n.role == NodeRole::Candidate ? "candidate" : "prerequisite";
    }
    doc["nodes"].push_back(j);
  }
  doc["edges"] = ojson::array();
  for (const auto& [from, to] : g.edges()) doc["edges"].push_back({from, to});
  return doc.dump(2);
}

std::string subgraph_to_dot(const ToolSubgraph& g) {
  std::string out = "digraph tool_subgraph {\n  rankdir=LR;\n";
  for (const auto& n : g.nodes()) {
    std::string label = n.is_root() ? "ROOT" : dot_escape(n.tool.name()) + "\\n" + dot_escape(n.task.name());
    if (n.serves) label += "\\n" + dot_escape(n.serves->label());
    out += "  n" + std::to_string(n.id) + " [label=\"" + label + "\"";
    if (n.role == NodeRole::Prerequisite) out += ", style=dashed";
    out += "];\n";
  }
  for (const auto& [from, to] : g.edges()) {
    out += "  n" + std::to_string(from) + " -> n" + std::to_string(to) + ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace costa

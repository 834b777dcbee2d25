#include "costa/subtask_tree.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "costa/dag.hpp"
#include "costa/error.hpp"

namespace costa {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string collapse(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : trim(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

// Position of the '(' matching the ')' at s.back(), or npos.
std::size_t matching_open(std::string_view s) {
  int depth = 0;
  for (std::size_t i = s.size(); i-- > 0;) {
    if (s[i] == ')') ++depth;
    if (s[i] == '(' && --depth == 0) return i;
  }
  return std::string_view::npos;
}

Adjacency child_lists(const SubtaskTree& tree) {
  Adjacency succ(tree.size());
  for (std::size_t v = 0; v < tree.size(); ++v) {
    for (std::size_t p : tree.parents[v]) succ[p].push_back(v);
  }
  for (auto& s : succ) std::sort(s.begin(), s.end());
  return succ;
}

}  // namespace

std::string SubtaskInstance::label() const {
  std::string out = kind.name();
  if (!argument.empty()) out += " (" + argument + ")";
  out += "(" + std::to_string(ordinal) + ")";
  return out;
}

SubtaskInstance parse_subtask_label(std::string_view label) {
  std::string_view rest = trim(label);
  SubtaskInstance inst;

  if (!rest.empty() && rest.back() == ')') {
    const std::size_t open = matching_open(rest);
    if (open != std::string_view::npos) {
      std::string_view inner = rest.substr(open + 1, rest.size() - open - 2);
      if (!inner.empty() &&
          std::all_of(inner.begin(), inner.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        inst.ordinal = std::stoi(std::string(inner));
        rest = trim(rest.substr(0, open));
      }
    }
  }

  // A kind may itself carry a parenthesised suffix, so try the whole
  // remainder before splitting off an argument.
  if (auto whole = Vocabulary::parse(rest)) {
    inst.kind = *whole;
    return inst;
  }
  if (!rest.empty() && rest.back() == ')') {
    const std::size_t open = matching_open(rest);
    if (open != std::string_view::npos) {
      inst.argument = collapse(rest.substr(open + 1, rest.size() - open - 2));
      inst.kind = parse_subtask_kind(trim(rest.substr(0, open)));
      return inst;
    }
  }
  inst.kind = parse_subtask_kind(rest);
  return inst;
}

std::vector<std::size_t> SubtaskTree::roots() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < size(); ++v) {
    if (parents[v].empty()) out.push_back(v);
  }
  return out;
}

std::vector<std::vector<std::size_t>> SubtaskTree::children() const { return child_lists(*this); }

std::vector<std::size_t> SubtaskTree::leaves() const {
  const auto succ = child_lists(*this);
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < size(); ++v) {
    if (succ[v].empty()) out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> SubtaskTree::topological_order() const {
  return costa::topological_order(child_lists(*this));
}

std::vector<std::vector<std::size_t>> SubtaskTree::chains() const {
  const auto succ = child_lists(*this);
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> path;
  auto walk = [&](auto&& self, std::size_t v) -> void {
    path.push_back(v);
    if (succ[v].empty()) out.push_back(path);
    for (std::size_t w : succ[v]) self(self, w);
    path.pop_back();
  };
  for (std::size_t r : roots()) walk(walk, r);
  return out;
}

SubtaskTree parse_subtask_tree(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("subtask tree: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("subtask_tree") || !doc["subtask_tree"].is_array()) {
    throw Error(ErrorCode::ParseError, "subtask tree: expected an object with a 'subtask_tree' array");
  }

  SubtaskTree tree;
  if (doc.contains("task")) {
    if (!doc["task"].is_string()) throw Error(ErrorCode::ParseError, "subtask tree: 'task' must be a string");
    tree.task_text = doc["task"].get<std::string>();
  }

  std::vector<std::string> raw_labels;
  std::vector<std::vector<std::string>> raw_parents;
  for (const auto& node : doc["subtask_tree"]) {
    if (!node.is_object() || !node.contains("subtask") || !node["subtask"].is_string() ||
        !node.contains("parent") || !node["parent"].is_array()) {
      throw Error(ErrorCode::ParseError, "subtask tree: each node needs 'subtask' and 'parent'");
    }
    raw_labels.push_back(collapse(node["subtask"].get<std::string>()));
    std::vector<std::string> ps;
    for (const auto& p : node["parent"]) {
      if (!p.is_string()) throw Error(ErrorCode::ParseError, "subtask tree: parent names must be strings");
      ps.push_back(collapse(p.get<std::string>()));
    }
    raw_parents.push_back(std::move(ps));
    tree.nodes.push_back(parse_subtask_label(raw_labels.back()));
  }

  int next_ordinal = 1;
  for (const auto& n : tree.nodes) next_ordinal = std::max(next_ordinal, n.ordinal + 1);
  for (auto& n : tree.nodes) {
    if (n.ordinal == 0) n.ordinal = next_ordinal++;
  }

  std::map<std::string, std::size_t> by_raw, by_label;
  std::set<std::tuple<SubtaskKind, std::string, int>> keys;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& n = tree.nodes[i];
    if (!keys.emplace(n.kind, n.argument, n.ordinal).second) {
      throw Error(ErrorCode::DuplicateEntry, "subtask '" + n.label() + "' appears twice");
    }
    by_raw.emplace(raw_labels[i], i);
    by_label.emplace(n.label(), i);
  }

  tree.parents.resize(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) {
    for (const auto& ref : raw_parents[i]) {
      std::size_t parent;
      if (auto it = by_raw.find(ref); it != by_raw.end()) {
        parent = it->second;
      } else {
        std::optional<std::size_t> hit;
        try {
          auto inst = parse_subtask_label(ref);
          if (inst.ordinal > 0) {
            if (auto jt = by_label.find(inst.label()); jt != by_label.end()) hit = jt->second;
          }
        } catch (const Error&) {
        }
        if (!hit) {
          throw Error(ErrorCode::DanglingParent,
                      "'" + raw_labels[i] + "' names unknown parent '" + ref + "'");
        }
        parent = *hit;
      }
      if (std::find(tree.parents[i].begin(), tree.parents[i].end(), parent) == tree.parents[i].end()) {
        tree.parents[i].push_back(parent);
      }
    }
  }

  if (tree.size() == 0) throw Error(ErrorCode::ParseError, "subtask tree: no subtasks");
  tree.topological_order();  // throws on cycles
  return tree;
}

std::string serialize_subtask_tree(const SubtaskTree& tree) {
  nlohmann::ordered_json doc;
  doc["task"] = tree.task_text;
  doc["subtask_tree"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    nlohmann::ordered_json parents = nlohmann::ordered_json::array();
    for (std::size_t p : tree.parents[i]) parents.push_back(tree.nodes[p].label());
    doc["subtask_tree"].push_back({{"subtask", tree.nodes[i].label()}, {"parent", parents}});
  }
  return doc.dump(2);
}

}  // namespace costa

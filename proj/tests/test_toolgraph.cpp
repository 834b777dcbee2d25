#include <doctest.h>

#include <chrono>
#include <fstream>

#include "costa/error.hpp"
#include "costa/subtask_tree.hpp"
#include "costa/toolgraph.hpp"
#include "test_support.hpp"

using namespace costa;
using testing::data_path;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected costa::Error");
  return ErrorCode::InvalidArgument;
}

SubtaskTree load_tree(const std::string& f) { return parse_subtask_tree(read_text_file(data_path(f))); }

ToolSubgraph expand(const std::string& mdt_file, const std::string& tree_file) {
  const auto mdt = load_mdt(data_path(mdt_file));
  return build_tool_subgraph(load_tree(tree_file), mdt, build_tdg(mdt));
}

std::set<std::pair<std::string, std::string>> names(const ToolDependencyGraph& tdg) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [a, b] : tdg.edges) out.insert({a.name(), b.name()});
  return out;
}

}  // namespace

TEST_CASE("TDG on the full MDT equals the pairwise oracle") {
  const auto rows = nlohmann::json::parse(read_text_file(data_path("mdt_full.json")));
  const auto tdg = build_tdg(load_mdt(data_path("mdt_full.json")));
  const auto expected = testing::pairwise_tdg_oracle(rows);
  CHECK(names(tdg) == expected);
  CHECK_FALSE(expected.empty());
  for (const auto& [a, b] : tdg.edges) CHECK(a != b);
}

TEST_CASE("TDG on the excerpt") {
  const auto tdg = build_tdg(load_mdt(data_path("mdt_excerpt.json")));
  CHECK(tdg.nodes.size() == 5);
  CHECK(tdg.has_edge(ToolId("YOLO"), ToolId("SAM")));
  CHECK(tdg.has_edge(ToolId("SAM"), ToolId("DALL-E")));
  CHECK(tdg.has_edge(ToolId("SAM"), ToolId("Stable Diffusion Inpaint")));
  CHECK_FALSE(tdg.has_edge(ToolId("EasyOCR"), ToolId("YOLO")));
  CHECK(tdg.edges.size() == 3);
}

TEST_CASE("disjoint I/O gives no TDG edges") {
  const auto mdt = parse_mdt(R"J([{"tool":"A","subtasks":["Object Detection"],"inputs":["Input Image"],"outputs":["P"]},
                                 {"tool":"B","subtasks":["Object Removal"],"inputs":["Q"],"outputs":["R"]}])J");
  CHECK(build_tdg(mdt).edges.empty());
}

TEST_CASE("TDG exports are deterministic") {
  const auto tdg = build_tdg(load_mdt(data_path("mdt_full.json")));
  CHECK(tdg_to_dot(tdg) == tdg_to_dot(build_tdg(load_mdt(data_path("mdt_full.json")))));
  const auto doc = nlohmann::json::parse(tdg_to_json(tdg));
  CHECK(doc.at("edges").size() == tdg.edges.size());
}

TEST_CASE("replacement on the excerpt splices detection and segmentation") {
  const auto g = expand("mdt_excerpt.json", "replace_cat_tree.json");
  REQUIRE(g.size() == 5);
  CHECK(g.edge_count() == 4);
  CHECK(g.node(1).tool.name() == "YOLO");
  CHECK(g.node(1).role == NodeRole::Prerequisite);
  CHECK(g.node(2).tool.name() == "SAM");
  CHECK(g.successors(0) == std::vector<NodeId>{1});
  CHECK(g.successors(1) == std::vector<NodeId>{2});
  CHECK(g.successors(2) == std::vector<NodeId>{3, 4});
  std::set<std::string> leaves;
  for (auto l : g.leaves()) leaves.insert(g.node(l).tool.name());
  CHECK(leaves == std::set<std::string>{"DALL-E", "Stable Diffusion Inpaint"});
}

TEST_CASE("deblurring needs no prerequisites") {
  const auto g = expand("mdt_full.json", "single_deblur_tree.json");
  CHECK(g.size() == 2);
  CHECK(g.edge_count() == 1);
  CHECK(g.node(1).tool.name() == "DeblurGAN");
}

TEST_CASE("example 1 expansion matches the hand count") {
  // Instance 1: {DINO, YOLOv7}. Instances 2 and 4 each get a SAM prerequisite
  // feeding two candidates. Instances 3 and 5 reuse the masks (two candidates
  // each). Instance 6: {SD Inpaint, SD Search & Recolor}.
  // Nodes: 1 + 2 + 3 + 2 + 3 + 2 + 2 = 15.
  // Edges: 2 + 4 (both detectors to both SAMs) + 2 + 4 + 2 + 4 + 4 + 4 = 26.
  // Paths per chain: 2 * 1 * 2 * 2 * 2 = 16, two chains -> 32.
  const auto g = expand("mdt_full.json", "example1_tree.json");
  CHECK(g.size() == 15);
  CHECK(g.edge_count() == 26);
  CHECK(enumerate_paths(g).size() == 32);
  CHECK(count_paths(g) == 32);
}

TEST_CASE("example 2 expansion matches the hand count") {
  // Text replacement: CRAFT -> DeepFont -> EasyOCR -> LLM -> DALL-E -> Pillow.
  // Four detection instances with two detectors each, SAM, then two removers.
  const auto g = expand("mdt_full.json", "example2_tree.json");
  CHECK(g.size() == 18);
  CHECK(g.edge_count() == 24);
  CHECK(count_paths(g) == 16);
}

TEST_CASE("subgraph soundness, completeness and coverage") {
  for (const auto* tree_file : {"example1_tree.json", "example2_tree.json", "replace_cat_tree.json",
                                "single_deblur_tree.json", "detection_fixture/tree.json"}) {
    CAPTURE(tree_file);
    const auto mdt = load_mdt(data_path("mdt_full.json"));
    const auto tree = load_tree(tree_file);
    const auto g = build_tool_subgraph(tree, mdt, build_tdg(mdt));
    validate_dag(g);

    const auto chains = tree.chains();
    for (const auto& path : enumerate_paths(g)) {
      REQUIRE(path.front() == ToolSubgraph::kRoot);
      CHECK(g.is_leaf(path.back()));
      ResourceSet available{input_image_resource()};
      std::vector<std::size_t> visited;
      for (std::size_t i = 1; i < path.size(); ++i) {
        const auto& node = g.node(path[i]);
        const auto* row = row_of(mdt, node);
        REQUIRE(row != nullptr);
        for (const auto& r : row->inputs) CHECK_MESSAGE(available.count(r), node.describe(), " lacks ", r.display());
        available.insert(row->outputs.begin(), row->outputs.end());
        if (node.role == NodeRole::Candidate) visited.push_back(node.instance);
      }
      CHECK(std::find(chains.begin(), chains.end(), visited) != chains.end());
    }

    for (std::size_t i = 0; i < tree.size(); ++i) {
      std::set<ToolId> candidates;
      for (const auto& n : g.nodes()) {
        if (n.role == NodeRole::Candidate && n.instance == i) {
          candidates.insert(n.tool);
          CHECK(n.task == tree.nodes[i].kind);
        }
      }
      CHECK(candidates == lookup_models(mdt, tree.nodes[i].kind));
    }
  }
}

TEST_CASE("expansion errors") {
  const auto excerpt = load_mdt(data_path("mdt_excerpt.json"));
  CHECK(code_of([&] { build_tool_subgraph(load_tree("single_deblur_tree.json"), excerpt, build_tdg(excerpt)); }) ==
        ErrorCode::NoToolForSubtask);

  const auto mdt = parse_mdt(R"J([{"tool":"X","subtasks":["Object Removal"],"inputs":["Depth Map"],"outputs":["Edited Image"]}])J");
  const auto tree = parse_subtask_tree(R"J({"subtask_tree":[{"subtask":"Object Removal (Car)(1)","parent":[]}]})J");
  CHECK(code_of([&] { build_tool_subgraph(tree, mdt, build_tdg(mdt)); }) == ErrorCode::UnsatisfiableDependency);
}

TEST_CASE("validate_dag") {
  validate_dag(ToolSubgraph{});
  ToolSubgraph g;
  const auto a = g.add_node(testing::plain_node("a"));
  const auto b = g.add_node(testing::plain_node("b"));
  g.add_edge(0, a);
  g.add_edge(a, b);
  validate_dag(g);
  g.add_edge(b, a);
  try {
    validate_dag(g);
    FAIL("expected CycleDetected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CycleDetected);
    CHECK(std::string(e.what()).find("->") != std::string::npos);
  }
  CHECK(code_of([&] { g.add_edge(0, 99); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("enumerate_paths on small shapes") {
  ToolSubgraph chain;
  NodeId prev = 0;
  for (int i = 0; i < 3; ++i) {
    const auto v = chain.add_node(testing::plain_node("c" + std::to_string(i)));
    chain.add_edge(prev, v);
    prev = v;
  }
  CHECK(enumerate_paths(chain) == std::vector<std::vector<NodeId>>{{0, 1, 2, 3}});

  ToolSubgraph diamond;
  const auto a = diamond.add_node(testing::plain_node("A"));
  const auto b = diamond.add_node(testing::plain_node("B"));
  const auto c = diamond.add_node(testing::plain_node("C"));
  diamond.add_edge(0, a);
  diamond.add_edge(0, b);
  diamond.add_edge(a, c);
  diamond.add_edge(b, c);
  CHECK(enumerate_paths(diamond) == std::vector<std::vector<NodeId>>{{0, a, c}, {0, b, c}});
  CHECK(code_of([&] { enumerate_paths(diamond, 1); }) == ErrorCode::PathExplosion);
  CHECK(enumerate_paths(ToolSubgraph{}) == std::vector<std::vector<NodeId>>{{0}});
}

TEST_CASE("count_paths agrees with enumeration on random graphs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto cg = testing::random_cost_graph(seed, 20, true);
    const auto paths = enumerate_paths(cg.g);
    CHECK(count_paths(cg.g) == paths.size());
    CHECK(std::is_sorted(paths.begin(), paths.end()));
  }
}

TEST_CASE("subgraph exports") {
  const auto g = expand("mdt_excerpt.json", "replace_cat_tree.json");
  const auto doc = nlohmann::json::parse(subgraph_to_json(g));
  CHECK(doc.at("nodes").size() == 5);
  CHECK(doc.at("edges").size() == 4);
  CHECK(doc.at("nodes")[0].at("tool") == "ROOT");
  CHECK(doc.at("nodes")[3].at("argument") == "Cat -> Rabbit");
  const auto dot = subgraph_to_dot(g);
  CHECK(dot.find("ROOT") != std::string::npos);
  CHECK(dot.find("n1 -> n2") != std::string::npos);
  CHECK(subgraph_to_dot(expand("mdt_excerpt.json", "replace_cat_tree.json")) == dot);
}

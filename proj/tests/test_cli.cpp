#include <doctest.h>

#include "cli_support.hpp"
#include "test_support.hpp"

using testing::data_path;
using testing::run_cli;
using testing::slurp;

namespace {

std::string fixture_args() {
  return "--mdt " + data_path("detection_fixture/mdt.json") + " --benchmark " + data_path("benchmark_full.json") +
         " --tree " + data_path("detection_fixture/tree.json");
}

std::string full_args(const std::string& tree) {
  return "--mdt " + data_path("mdt_full.json") + " --benchmark " + data_path("benchmark_full.json") + " --tree " +
         data_path(tree);
}

}  // namespace

TEST_CASE("plan on the detection fixture writes plan, trace and manifest") {
  const auto dir = testing::scratch_dir("cli_plan");
  const auto out = (dir / "plan.json").string();
  REQUIRE(run_cli("plan " + fixture_args() + " --alpha 2 --out " + out, dir) == 0);
  const auto plan = nlohmann::json::parse(slurp(out));
  CHECK(plan.at("status") == "found");
  CHECK(plan.at("path")[0].at("tool") == "YOLOv7");
  const auto trace = nlohmann::json::parse(slurp(dir / "plan.trace.json"));
  CHECK(trace.at("events").size() > 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "plan.manifest.json"));
  CHECK(manifest.at("seed") == 20250101);
  CHECK(manifest.at("inputs").at("mdt").at("sha256").get<std::string>().size() == 64);
  CHECK(manifest.at("config_hash").get<std::string>().size() == 64);
  CHECK(manifest.at("command_line").get<std::string>().find("--alpha 2") != std::string::npos);
}

TEST_CASE("plan without a tree prints usage and exits 1") {
  const auto dir = testing::scratch_dir("cli_usage");
  CHECK(run_cli("plan --mdt " + data_path("mdt_full.json") + " --benchmark " + data_path("benchmark_full.json"), dir) ==
        1);
  const auto err = slurp(dir / "run.err");
  CHECK(err.find("--tree") != std::string::npos);
  CHECK(err.find("Usage") != std::string::npos);
}

TEST_CASE("plan with an always-failing scripted simulator exits 2") {
  const auto dir = testing::scratch_dir("cli_fail");
  CHECK(run_cli("plan " + full_args("single_deblur_tree.json") + " --sim " + data_path("always_fail_sim.json"), dir) ==
        2);
  CHECK(nlohmann::json::parse(slurp(dir / "run.out")).at("status") == "exhausted");
}

TEST_CASE("plan input errors exit 1") {
  const auto dir = testing::scratch_dir("cli_input");
  CHECK(run_cli("plan " + fixture_args() + " --alpha 2.5", dir) == 1);
  CHECK(run_cli("plan --mdt " + data_path("mdt_excerpt.json") + " --benchmark " + data_path("benchmark_full.json") +
                    " --tree " + data_path("single_deblur_tree.json"),
                dir) == 1);
  CHECK(run_cli("plan --mdt /nonexistent.json --tree x", dir) == 1);
  CHECK(run_cli("frobnicate", dir) == 1);
}

TEST_CASE("plan via the planner endpoint without configuration exits 1") {
  const auto dir = testing::scratch_dir("cli_endpoint");
  ::unsetenv("COSTA_PLANNER_URL");
  CHECK(run_cli("plan --mdt " + data_path("mdt_full.json") + " --benchmark " + data_path("benchmark_full.json") +
                    " --task \"remove the car\"",
                dir) == 1);
  CHECK(slurp(dir / "run.err").find("EndpointUnavailable") != std::string::npos);
}

TEST_CASE("sweep") {
  const auto dir = testing::scratch_dir("cli_sweep");
  const auto csv = (dir / "front.csv").string();
  REQUIRE(run_cli("sweep " + fixture_args() + " --alphas 0,2 --csv " + csv, dir) == 0);
  const auto text = slurp(csv);
  CHECK(text.rfind("alpha,total_time,quality_product,g_final,non_dominated\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(std::filesystem::exists(dir / "front.manifest.json"));

  REQUIRE(run_cli("sweep " + fixture_args() + " --alphas 1,1", dir, "dup") == 0);
  std::istringstream lines(slurp(dir / "dup.out"));
  std::string header, a, b;
  std::getline(lines, header);
  std::getline(lines, a);
  std::getline(lines, b);
  CHECK(a == b);

  CHECK(run_cli("sweep " + fixture_args() + " --alphas 3", dir, "bad") == 1);
  CHECK(slurp(dir / "bad.err").find("AlphaOutOfRange") != std::string::npos);
}

TEST_CASE("verify") {
  const auto dir = testing::scratch_dir("cli_verify");
  CHECK(run_cli("verify --random 50 --unit-quality --alphas 1", dir, "corner") == 0);
  const auto corner = nlohmann::json::parse(slurp(dir / "corner.out"));
  CHECK(corner.at("corner_runs") == 50);
  CHECK(corner.at("corner_max_gap") == 0.0);

  CHECK(run_cli("verify " + fixture_args() + " --alphas 2", dir, "fixture") == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "fixture.out")).at("max_gap") == 0.0);

  CHECK(run_cli("verify " + full_args("example1_tree.json") + " --paths-cap 10", dir, "cap") == 3);
}

TEST_CASE("graph export") {
  const auto dir = testing::scratch_dir("cli_graph");
  REQUIRE(run_cli("graph --mdt " + data_path("mdt_excerpt.json"), dir, "tdg") == 0);
  const auto dot = slurp(dir / "tdg.out");
  CHECK(dot.find("\"YOLO\" -> \"SAM\"") != std::string::npos);
  CHECK(std::count(dot.begin(), dot.end(), ';') == 1 + 5 + 3);  // rankdir, nodes, edges

  REQUIRE(run_cli("graph --mdt " + data_path("mdt_full.json") + " --format json", dir, "full") == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "full.out"));
  const auto oracle = testing::pairwise_tdg_oracle(nlohmann::json::parse(slurp(data_path("mdt_full.json"))));
  CHECK(doc.at("edges").size() == oracle.size());

  REQUIRE(run_cli("graph --mdt " + data_path("mdt_excerpt.json") + " --tree " + data_path("replace_cat_tree.json"), dir,
                  "sub") == 0);
  CHECK(slurp(dir / "sub.out").find("ROOT") != std::string::npos);
  CHECK(run_cli("graph --mdt " + data_path("mdt_excerpt.json") + " --format svg", dir, "fmt") == 1);
}

TEST_CASE("repeated runs are byte-identical") {
  const auto dir = testing::scratch_dir("cli_determinism");
  for (const auto* tag : {"a", "b"}) {
    REQUIRE(run_cli("plan " + full_args("example1_tree.json") + " --sim stochastic --seed 9 --out " +
                        (dir / (std::string(tag) + ".json")).string(),
                    dir, tag) == 0);
  }
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK(slurp(dir / "a.trace.json") == slurp(dir / "b.trace.json"));
}

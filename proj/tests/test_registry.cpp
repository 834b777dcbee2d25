#include <doctest.h>

#include <fstream>
#include <random>

#include "costa/error.hpp"
#include "costa/registry.hpp"
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

BenchmarkKey key(const std::string& tool, const std::string& kind) {
  return {ToolId(tool), parse_subtask_kind(kind)};
}

}  // namespace

TEST_CASE("vocabulary has 24 plannable subtasks and resolves aliases") {
  CHECK(Vocabulary::plannable().size() == 24);
  std::set<SubtaskKind> unique(Vocabulary::plannable().begin(), Vocabulary::plannable().end());
  CHECK(unique.size() == 24);
  CHECK(parse_subtask_kind("  object   DETECTION ").name() == "Object Detection");
  CHECK(parse_subtask_kind("Segmentation").name() == "Object Segmentation");
  CHECK(parse_subtask_kind("Changing Scenery (Day2Night)").name() == "Changing Scenery");
  CHECK_FALSE(Vocabulary::is_plannable(parse_subtask_kind("Text Style Detection")));
  CHECK(code_of([] { parse_subtask_kind("Object Teleportation"); }) == ErrorCode::UnknownSubtask);
}

TEST_CASE("resource types match after case, whitespace and plural folding") {
  CHECK(ResourceType("Segmentation Masks") == ResourceType("segmentation  mask"));
  CHECK(ResourceType("Bounding Boxes") == ResourceType(" bounding   BOXES"));
  CHECK_FALSE(ResourceType("Bounding Boxes") == ResourceType("Text Bounding Box"));
  CHECK(ResourceType("Input Image").display() == "Input Image");
}

TEST_CASE("excerpt MDT loads with the expected SAM row") {
  const auto mdt = load_mdt(data_path("mdt_excerpt.json"));
  CHECK(mdt.entries().size() == 7);  // SD Inpaint row explodes into 3 subtasks
  CHECK(mdt.tools().size() == 5);
  const auto* sam = mdt.find(ToolId("SAM"), parse_subtask_kind("Object Segmentation"));
  REQUIRE(sam != nullptr);
  CHECK(sam->inputs == ResourceSet{ResourceType("Bounding Boxes")});
  CHECK(sam->outputs == ResourceSet{ResourceType("Segmentation Masks")});
  CHECK(lookup_models(mdt, parse_subtask_kind("Object Detection")) == std::set<ToolId>{ToolId("YOLO")});
  CHECK(lookup_models(mdt, parse_subtask_kind("Image Deblurring")).empty());
}

TEST_CASE("empty MDT warns for every plannable subtask") {
  const auto mdt = parse_mdt("[]");
  CHECK(mdt.empty());
  CHECK(mdt.warnings().size() == 24);
}

TEST_CASE("MDT load errors") {
  CHECK(code_of([] { parse_mdt("[{\"tool\": \"X\""); }) == ErrorCode::ParseError);
  CHECK(code_of([] {
          parse_mdt(R"J([{"tool":"X","subtasks":["Object Teleportation"],"inputs":["Input Image"],"outputs":["A"]}])J");
        }) == ErrorCode::UnknownSubtask);
  CHECK(code_of([] {
          parse_mdt(R"J([{"tool":"X","subtasks":["Object Detection"],"inputs":["Input Image"],"outputs":["A"]},
                        {"tool":"X","subtasks":["Object Detection"],"inputs":["Input Image"],"outputs":["B"]}])J");
        }) == ErrorCode::DuplicateEntry);
  CHECK(code_of([] { load_mdt(data_path("no_such_file.json")); }) == ErrorCode::ParseError);
}

TEST_CASE("full MDT covers every plannable subtask and round-trips") {
  const auto mdt = load_mdt(data_path("mdt_full.json"));
  CHECK(mdt.warnings().empty());
  CHECK(lookup_models(mdt, parse_subtask_kind("Object Removal")) ==
        std::set<ToolId>{ToolId("Stable Diffusion Erase"), ToolId("Stable Diffusion Inpaint")});
  for (const auto& k : Vocabulary::plannable()) CHECK_FALSE(lookup_models(mdt, k).empty());

  const auto again = parse_mdt(serialize_mdt(mdt));
  REQUIRE(again.entries().size() == mdt.entries().size());
  for (std::size_t i = 0; i < mdt.entries().size(); ++i) {
    const auto& a = mdt.entries()[i];
    const auto& b = again.entries()[i];
    CHECK(a.tool == b.tool);
    CHECK(a.subtask == b.subtask);
    CHECK(a.inputs == b.inputs);
    CHECK(a.outputs == b.outputs);
  }
  CHECK(serialize_mdt(again) == serialize_mdt(mdt));
}

TEST_CASE("benchmark values load as transcribed") {
  const auto mdt = load_mdt(data_path("mdt_full.json"));
  const auto bt = load_benchmark(data_path("benchmark_full.json"), mdt);
  const auto& yolo = bt.at(ToolId("YOLOv7"), parse_subtask_kind("Object Detection"));
  CHECK(yolo.time_seconds == 0.0062);
  CHECK(yolo.quality_norm == 0.82);
  const auto& dino = bt.at(ToolId("Grounding DINO"), parse_subtask_kind("Object Detection"));
  CHECK(dino.time_seconds == 0.119);
  CHECK(dino.quality_norm == 1.0);
  const auto& inpaint = bt.at(ToolId("Stable Diffusion Inpaint"), parse_subtask_kind("Object Removal"));
  CHECK(inpaint.time_seconds == 12.1);
  CHECK(inpaint.quality_norm == 0.93);

  std::map<SubtaskKind, double> max_q;
  for (const auto& [k, e] : bt.entries()) {
    CHECK(e.time_seconds >= 0.0);
    CHECK(e.quality_norm > 0.0);
    CHECK(e.quality_norm <= 1.0);
    max_q[k.second] = std::max(max_q[k.second], e.quality_norm);
  }
  for (const auto& [k, q] : max_q) CHECK(q == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& e : mdt.entries()) CHECK(bt.find(e.tool, e.subtask) != nullptr);
}

TEST_CASE("benchmark errors") {
  const auto mdt = parse_mdt(R"J([{"tool":"A","subtasks":["Object Detection"],"inputs":["Input Image"],"outputs":["Bounding Boxes"]},
                                 {"tool":"B","subtasks":["Object Detection"],"inputs":["Input Image"],"outputs":["Bounding Boxes"]}])J");
  CHECK(code_of([&] {
          parse_benchmark(R"J([{"tool":"A","subtask":"Object Detection","time_seconds":1,"quality":1}])J", mdt);
        }) == ErrorCode::MissingBenchmark);
  CHECK(code_of([&] {
          parse_benchmark(R"J([{"tool":"A","subtask":"Object Detection","time_seconds":-1,"quality":1},
                              {"tool":"B","subtask":"Object Detection","time_seconds":1,"quality":1}])J", mdt);
        }) == ErrorCode::NegativeTime);
  CHECK(code_of([&] { parse_benchmark("{", mdt); }) == ErrorCode::ParseError);

  const auto bt = parse_benchmark(R"J([{"tool":"A","subtask":"Object Detection","time_seconds":1,"quality":40},
                                      {"tool":"B","subtask":"Object Detection","time_seconds":2,"quality":50}])J", mdt);
  CHECK(bt.at(ToolId("A"), parse_subtask_kind("Object Detection")).quality_norm == doctest::Approx(0.8));
  CHECK(bt.at(ToolId("A"), parse_subtask_kind("Object Detection")).quality_raw == 40.0);
  CHECK(bt.at(ToolId("B"), parse_subtask_kind("Object Detection")).quality_norm == 1.0);
  CHECK(code_of([&] { bt.at(ToolId("C"), parse_subtask_kind("Object Detection")); }) == ErrorCode::MissingBenchmark);
}

TEST_CASE("normalize_quality examples") {
  const auto s = "Object Detection";
  auto out = normalize_quality({{key("A", s), 0.5}, {key("B", s), 1.0}});
  CHECK(out.at(key("A", s)) == 0.5);
  CHECK(out.at(key("B", s)) == 1.0);
  out = normalize_quality({{key("A", s), 40.0}, {key("B", s), 50.0}});
  CHECK(out.at(key("A", s)) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(out.at(key("B", s)) == 1.0);
  CHECK(normalize_quality({{key("A", s), 7.0}}).at(key("A", s)) == 1.0);
  CHECK(code_of([&] { normalize_quality({{key("A", s), 0.0}}); }) == ErrorCode::NonPositiveQuality);
}

TEST_CASE("normalize_quality is idempotent and pins each subtask max to 1") {
  std::mt19937_64 rng(7);
  const auto& kinds = Vocabulary::plannable();
  for (int trial = 0; trial < 200; ++trial) {
    std::map<BenchmarkKey, double> raw;
    const int n = std::uniform_int_distribution<int>(1, 30)(rng);
    for (int i = 0; i < n; ++i) {
      const auto& k = kinds[std::uniform_int_distribution<std::size_t>(0, 3)(rng)];
      raw[{ToolId("t" + std::to_string(i)), k}] = std::uniform_real_distribution<double>(0.01, 100.0)(rng);
    }
    const auto once = normalize_quality(raw);
    const auto twice = normalize_quality(once);
    std::map<SubtaskKind, double> max_q;
    for (const auto& [k, v] : once) {
      CHECK(twice.at(k) == doctest::Approx(v).epsilon(1e-15));
      max_q[k.second] = std::max(max_q[k.second], v);
    }
    for (const auto& [k, q] : max_q) CHECK(std::abs(q - 1.0) <= 1e-12);
  }
}

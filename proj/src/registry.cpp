#include "costa/registry.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "costa/error.hpp"

namespace costa {

namespace {

using nlohmann::json;

std::string collapse_lower(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
}

template <class T>
T required_field(const json& obj, const char* field, std::string_view what) {
  if (!obj.is_object() || !obj.contains(field)) {
    throw Error(ErrorCode::ParseError,
                std::string(what) + ": missing field '" + field + "'");
  }
  try {
    return obj.at(field).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError,
                std::string(what) + ": field '" + field + "': " + e.what());
  }
}

}  // namespace

ToolId::ToolId(std::string name) : name_(std::move(name)) {}

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

const std::vector<SubtaskKind>& Vocabulary::plannable() {
  static const std::vector<SubtaskKind> kinds = [] {
    std::vector<SubtaskKind> v;
    for (const char* name :
         {"Object Detection", "Object Segmentation", "Object Addition", "Object Removal",
          "Background Removal", "Landmark Detection", "Object Replacement", "Image Upscaling",
          "Image Captioning", "Changing Scenery", "Object Recoloration", "Outpainting",
          "Depth Estimation", "Image Deblurring", "Text Extraction", "Text Replacement",
          "Text Removal", "Text Addition", "Text Redaction", "Question Answering Based on Text",
          "Keyword Highlighting", "Sentiment Analysis", "Caption Consistency Check",
          "Text Detection"}) {
      v.push_back(SubtaskKind(name));
    }
    return v;
  }();
  return kinds;
}

const std::vector<SubtaskKind>& Vocabulary::auxiliary() {
  static const std::vector<SubtaskKind> kinds{SubtaskKind("Text Style Detection")};
  return kinds;
}

std::optional<SubtaskKind> Vocabulary::parse(std::string_view name) {
  static const std::map<std::string, SubtaskKind> index = [] {
    std::map<std::string, SubtaskKind> m;
    for (const auto& k : plannable()) m.emplace(collapse_lower(k.name()), k);
    for (const auto& k : auxiliary()) m.emplace(collapse_lower(k.name()), k);
    auto alias = [&m](std::string_view spelling, std::string_view canonical) {
      m.emplace(collapse_lower(spelling), m.at(collapse_lower(canonical)));
    };
    // Spellings used by the published tables for vocabulary members.
    alias("Segmentation", "Object Segmentation");
    alias("Changing Scenery (Day2Night)", "Changing Scenery");
    alias("Text Removal (Fallback)", "Text Removal");
    return m;
  }();
  auto it = index.find(collapse_lower(name));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::is_plannable(const SubtaskKind& kind) {
  const auto& p = plannable();
  return std::find(p.begin(), p.end(), kind) != p.end();
}

SubtaskKind parse_subtask_kind(std::string_view name) {
  auto kind = Vocabulary::parse(name);
  if (!kind) throw Error(ErrorCode::UnknownSubtask, "'" + std::string(name) + "'");
  return *kind;
}

// ---------------------------------------------------------------------------
// Resources
// ---------------------------------------------------------------------------

std::string ResourceType::normalize(std::string_view raw) {
  std::string key = collapse_lower(raw);
  if (ends_with(key, "xes")) {
    key.resize(key.size() - 2);
  } else if (ends_with(key, "s") && !ends_with(key, "ss")) {
    key.pop_back();
  }
  return key;
}

ResourceType::ResourceType(std::string_view display)
    : display_(display), key_(normalize(display)) {}

const ResourceType& input_image_resource() {
  static const ResourceType r("Input Image");
  return r;
}

// ---------------------------------------------------------------------------
// MDT
// ---------------------------------------------------------------------------

ModelDescriptionTable::ModelDescriptionTable(std::vector<MdtEntry> entries)
    : entries_(std::move(entries)) {
  std::set<std::pair<ToolId, SubtaskKind>> seen;
  std::set<SubtaskKind> covered;
  for (const auto& e : entries_) {
    if (e.tool.name().empty()) throw Error(ErrorCode::ParseError, "empty tool name");
    if (!seen.emplace(e.tool, e.subtask).second) {
      throw Error(ErrorCode::DuplicateEntry,
                  "(" + e.tool.name() + ", " + e.subtask.name() + ") listed twice");
    }
    covered.insert(e.subtask);
  }
  for (const auto& k : Vocabulary::plannable()) {
    if (!covered.count(k)) warnings_.push_back("no tool supports subtask '" + k.name() + "'");
  }
}

const MdtEntry* ModelDescriptionTable::find(const ToolId& tool,
                                            const SubtaskKind& subtask) const {
  for (const auto& e : entries_) {
    if (e.tool == tool && e.subtask == subtask) return &e;
  }
  return nullptr;
}

std::vector<ToolId> ModelDescriptionTable::tools() const {
  std::set<ToolId> s;
  for (const auto& e : entries_) s.insert(e.tool);
  return {s.begin(), s.end()};
}

ResourceSet ModelDescriptionTable::inputs_of(const ToolId& tool) const {
  ResourceSet out;
  for (const auto& e : entries_) {
    if (e.tool == tool) out.insert(e.inputs.begin(), e.inputs.end());
  }
  return out;
}

ResourceSet ModelDescriptionTable::outputs_of(const ToolId& tool) const {
  ResourceSet out;
  for (const auto& e : entries_) {
    if (e.tool == tool) out.insert(e.outputs.begin(), e.outputs.end());
  }
  return out;
}

ModelDescriptionTable parse_mdt(std::string_view json_text) {
  const json doc = parse_json(json_text, "MDT");
  if (!doc.is_array()) throw Error(ErrorCode::ParseError, "MDT: top level must be an array");

  std::vector<MdtEntry> entries;
  for (const auto& row : doc) {
    const auto tool = required_field<std::string>(row, "tool", "MDT row");
    const auto subtasks = required_field<std::vector<std::string>>(row, "subtasks", "MDT row");
    const auto inputs = required_field<std::vector<std::string>>(row, "inputs", "MDT row");
    const auto outputs = required_field<std::vector<std::string>>(row, "outputs", "MDT row");
    if (subtasks.empty()) throw Error(ErrorCode::ParseError, "MDT row '" + tool + "' has no subtasks");

    ResourceSet in, out;
    for (const auto& r : inputs) in.emplace(r);
    for (const auto& r : outputs) out.emplace(r);
    for (const auto& s : subtasks) {
      entries.push_back(MdtEntry{ToolId(tool), parse_subtask_kind(s), in, out});
    }
  }
  return ModelDescriptionTable(std::move(entries));
}

ModelDescriptionTable load_mdt(const std::string& path) {
  return parse_mdt(read_text_file(path));
}

std::string serialize_mdt(const ModelDescriptionTable& mdt) {
  json doc = json::array();
  for (const auto& e : mdt.entries()) {
    json inputs = json::array(), outputs = json::array();
    for (const auto& r : e.inputs) inputs.push_back(r.display());
    for (const auto& r : e.outputs) outputs.push_back(r.display());
    doc.push_back({{"tool", e.tool.name()},
                   {"subtasks", json::array({e.subtask.name()})},
                   {"inputs", inputs},
                   {"outputs", outputs}});
  }
  return doc.dump(2);
}

std::set<ToolId> lookup_models(const ModelDescriptionTable& mdt, const SubtaskKind& kind) {
  std::set<ToolId> out;
  for (const auto& e : mdt.entries()) {
    if (e.subtask == kind) out.insert(e.tool);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Benchmark
// ---------------------------------------------------------------------------

std::map<BenchmarkKey, double> normalize_quality(const std::map<BenchmarkKey, double>& raw) {
  std::map<SubtaskKind, double> best;
  for (const auto& [key, value] : raw) {
    if (!(value > 0.0)) {
      throw Error(ErrorCode::NonPositiveQuality,
                  "(" + key.first.name() + ", " + key.second.name() + ")");
    }
    auto [it, inserted] = best.emplace(key.second, value);
    if (!inserted) it->second = std::max(it->second, value);
  }
  std::map<BenchmarkKey, double> out;
  for (const auto& [key, value] : raw) out.emplace(key, value / best.at(key.second));
  return out;
}

BenchmarkTable::BenchmarkTable(const std::vector<BenchmarkRow>& rows,
                               const ModelDescriptionTable* mdt) {
  std::map<BenchmarkKey, double> raw;
  for (const auto& row : rows) {
    const BenchmarkKey key{row.tool, row.subtask};
    if (!(row.time_seconds >= 0.0)) {
      throw Error(ErrorCode::NegativeTime, "(" + row.tool.name() + ", " + row.subtask.name() + ")");
    }
    if (!raw.emplace(key, row.quality).second) {
      throw Error(ErrorCode::DuplicateEntry,
                  "benchmark (" + row.tool.name() + ", " + row.subtask.name() + ") listed twice");
    }
    entries_[key] = BenchmarkEntry{row.time_seconds, row.quality, 0.0};
  }
  for (const auto& [key, q] : normalize_quality(raw)) entries_[key].quality_norm = q;

  if (mdt) {
    for (const auto& e : mdt->entries()) {
      if (!find(e.tool, e.subtask)) {
        throw Error(ErrorCode::MissingBenchmark,
                    "no benchmark row for (" + e.tool.name() + ", " + e.subtask.name() + ")");
      }
    }
  }
}

const BenchmarkEntry* BenchmarkTable::find(const ToolId& tool, const SubtaskKind& subtask) const {
  auto it = entries_.find(BenchmarkKey{tool, subtask});
  return it == entries_.end() ? nullptr : &it->second;
}

const BenchmarkEntry& BenchmarkTable::at(const ToolId& tool, const SubtaskKind& subtask) const {
  if (const auto* e = find(tool, subtask)) return *e;
  throw Error(ErrorCode::MissingBenchmark,
              "no benchmark row for (" + tool.name() + ", " + subtask.name() + ")");
}

BenchmarkTable parse_benchmark(std::string_view json_text, const ModelDescriptionTable& mdt) {
  const json doc = parse_json(json_text, "benchmark");
  if (!doc.is_array()) throw Error(ErrorCode::ParseError, "benchmark: top level must be an array");

  std::vector<BenchmarkRow> rows;
  for (const auto& row : doc) {
    rows.push_back(BenchmarkRow{
        ToolId(required_field<std::string>(row, "tool", "benchmark row")),
        parse_subtask_kind(required_field<std::string>(row, "subtask", "benchmark row")),
        required_field<double>(row, "time_seconds", "benchmark row"),
        required_field<double>(row, "quality", "benchmark row")});
  }
  return BenchmarkTable(rows, &mdt);
}

BenchmarkTable load_benchmark(const std::string& path, const ModelDescriptionTable& mdt) {
  return parse_benchmark(read_text_file(path), mdt);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace costa

#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace costa {

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

class ToolId {
 public:
  ToolId() = default;
  explicit ToolId(std::string name);

  const std::string& name() const noexcept { return name_; }

  auto operator<=>(const ToolId&) const = default;

 private:
  std::string name_;
};

/// A subtask name from the closed vocabulary, always held in canonical form.
/// Construct through parse_subtask_kind(); the raw constructor is reserved for
/// the vocabulary table itself.
class SubtaskKind {
 public:
  SubtaskKind() = default;

  const std::string& name() const noexcept { return name_; }

  auto operator<=>(const SubtaskKind&) const = default;

 private:
  friend class Vocabulary;
  explicit SubtaskKind(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

class Vocabulary {
 public:
  /// The 24 subtasks a planner may emit, in the order the planner prompt
  /// lists them.
  static const std::vector<SubtaskKind>& plannable();

  /// Subtasks that tools perform only as prerequisites of other tools
  /// (e.g. font-style detection feeding the text rewriter). Accepted in
  /// the tables, never offered to the planner.
  static const std::vector<SubtaskKind>& auxiliary();

  /// Case- and whitespace-insensitive lookup, including the alternate
  /// spellings the published tables use.
  static std::optional<SubtaskKind> parse(std::string_view name);

  static bool is_plannable(const SubtaskKind& kind);
};

/// Throws Error{UnknownSubtask} when the name is outside the vocabulary.
SubtaskKind parse_subtask_kind(std::string_view name);

/// Input/output artifact category. Equality uses a normalized key:
/// lowercased, whitespace collapsed, plural suffix stripped.
class ResourceType {
 public:
  ResourceType() = default;
  explicit ResourceType(std::string_view display);

  const std::string& display() const noexcept { return display_; }
  const std::string& key() const noexcept { return key_; }

  bool operator==(const ResourceType& o) const noexcept { return key_ == o.key_; }
  std::strong_ordering operator<=>(const ResourceType& o) const noexcept {
    return key_ <=> o.key_;
  }

  static std::string normalize(std::string_view raw);

 private:
  std::string display_;
  std::string key_;
};

using ResourceSet = std::set<ResourceType>;

/// The resource every plan starts from.
const ResourceType& input_image_resource();

// ---------------------------------------------------------------------------
// Model Description Table
// ---------------------------------------------------------------------------

/// One (tool, subtask) capability. Multi-subtask rows of the source table
/// are exploded into one entry per subtask sharing the I/O sets.
struct MdtEntry {
  ToolId tool;
  SubtaskKind subtask;
  ResourceSet inputs;
  ResourceSet outputs;
};

class ModelDescriptionTable {
 public:
  ModelDescriptionTable() = default;

  /// Validates (tool, subtask) uniqueness and records coverage warnings for
  /// plannable subtasks without any tool.
  explicit ModelDescriptionTable(std::vector<MdtEntry> entries);

  const std::vector<MdtEntry>& entries() const noexcept { return entries_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  bool empty() const noexcept { return entries_.empty(); }

  const MdtEntry* find(const ToolId& tool, const SubtaskKind& subtask) const;

  /// Distinct tools in ascending name order.
  std::vector<ToolId> tools() const;

  /// Union of the declared inputs/outputs across every row of a tool.
  ResourceSet inputs_of(const ToolId& tool) const;
  ResourceSet outputs_of(const ToolId& tool) const;

 private:
  std::vector<MdtEntry> entries_;
  std::vector<std::string> warnings_;
};

ModelDescriptionTable parse_mdt(std::string_view json_text);
ModelDescriptionTable load_mdt(const std::string& path);
std::string serialize_mdt(const ModelDescriptionTable& mdt);

/// M(s): every tool that lists `kind` among its subtasks.
std::set<ToolId> lookup_models(const ModelDescriptionTable& mdt, const SubtaskKind& kind);

// ---------------------------------------------------------------------------
// Benchmark Table
// ---------------------------------------------------------------------------

using BenchmarkKey = std::pair<ToolId, SubtaskKind>;

struct BenchmarkEntry {
  double time_seconds = 0.0;
  double quality_raw = 1.0;
  double quality_norm = 1.0;
};

struct BenchmarkRow {
  ToolId tool;
  SubtaskKind subtask;
  double time_seconds = 0.0;
  double quality = 1.0;
};

/// Divides each value by the maximum among entries sharing its subtask.
std::map<BenchmarkKey, double> normalize_quality(const std::map<BenchmarkKey, double>& raw);

class BenchmarkTable {
 public:
  BenchmarkTable() = default;

  /// Normalizes quality per subtask over all rows. When `mdt` is given,
  /// every (tool, subtask) pair of the MDT must have a row.
  explicit BenchmarkTable(const std::vector<BenchmarkRow>& rows,
                          const ModelDescriptionTable* mdt = nullptr);

  const std::map<BenchmarkKey, BenchmarkEntry>& entries() const noexcept { return entries_; }

  const BenchmarkEntry* find(const ToolId& tool, const SubtaskKind& subtask) const;

  /// Throws Error{MissingBenchmark}.
  const BenchmarkEntry& at(const ToolId& tool, const SubtaskKind& subtask) const;

 private:
  std::map<BenchmarkKey, BenchmarkEntry> entries_;
};

BenchmarkTable parse_benchmark(std::string_view json_text, const ModelDescriptionTable& mdt);
BenchmarkTable load_benchmark(const std::string& path, const ModelDescriptionTable& mdt);

/// Reads a whole file; throws Error{ParseError} when it cannot be opened.
std::string read_text_file(const std::string& path);

}  // namespace costa

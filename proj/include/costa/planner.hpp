#pragma once

#include <memory>
#include <string>
#include <vector>

#include "costa/registry.hpp"

namespace costa {

struct PlannerPrompt {
  std::string text;
};

/// Fills the decomposition prompt template with the task and the supported
/// subtask list. The image is referenced through a placeholder token only.
/// Throws Error{EmptyTask} for blank task text.
PlannerPrompt build_planner_prompt(const std::string& task_text,
                                   const std::vector<SubtaskKind>& vocabulary = Vocabulary::plannable());

inline constexpr const char* kImagePlaceholder = "<input_image>";

/// Something that turns a prompt into raw response text.
class PlannerClient {
 public:
  virtual ~PlannerClient() = default;
  virtual std::string complete(const PlannerPrompt& prompt) = 0;
};

/// Returns the contents of a canned response file, ignoring the prompt.
class StubPlannerClient : public PlannerClient {
 public:
  explicit StubPlannerClient(std::string path) : path_(std::move(path)) {}
  std::string complete(const PlannerPrompt& prompt) override;

 private:
  std::string path_;
};

/// POSTs `{"prompt": str}` to the endpoint and reads `{"text": str}` back.
/// Only plain http:// URLs are supported.
class HttpPlannerClient : public PlannerClient {
 public:
  explicit HttpPlannerClient(std::string base_url);
  std::string complete(const PlannerPrompt& prompt) override;

  const std::string& url() const noexcept { return url_; }

 private:
  std::string url_;
  std::string host_port_;
  std::string path_;
};

inline constexpr const char* kPlannerUrlEnv = "COSTA_PLANNER_URL";

/// Reads COSTA_PLANNER_URL; returns nullptr when it is unset or empty.
std::unique_ptr<PlannerClient> planner_client_from_env();

/// One attempt, no retries. Throws EndpointUnavailable when `client` is null
/// and TransportError on any I/O failure.
std::string request_tree(PlannerClient* client, const PlannerPrompt& prompt);

}  // namespace costa

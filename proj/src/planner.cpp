#include "costa/planner.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "costa/error.hpp"

namespace costa {

namespace {

constexpr const char* kPreamble =
    "You are an advanced reasoning model responsible for decomposing a given image editing task "
    "into a structured subtask tree. Your task is to generate a well-formed subtask tree that "
    "logically organizes all necessary steps to fulfill the given user prompt. Below are key "
    "guidelines and expectations:\n";

constexpr const char* kUnderstanding =
    "\n## Understanding the Subtask Tree\n"
    "A subtask tree is a structured representation of how the given image editing task should be "
    "broken down into smaller, logically ordered subtasks. Each node in the tree represents an "
    "atomic operation that must be performed on the image. The tree ensures that all necessary "
    "operations are logically ordered, meaning a subtask that depends on another must appear after "
    "its dependency.\n";

constexpr const char* kSteps =
    "\n## Steps to Generate the Subtask Tree\n"
    "1. Step 1: Identify all relevant subtasks needed to fulfill the given prompt.\n"
    "2. Step 2: Ensure that each subtask is logically ordered, meaning operations dependent on "
    "another should be placed later in the path.\n"
    "3. Step 3: Each subtask should be uniquely labeled based on the object it applies to and "
    "follow the format (Obj1 -> Obj2) where Obj1 is replaced with Obj2. In case of recoloring, use "
    "(Obj -> new color), while for removal, simply include (Obj) as the object being removed.\n"
    "4. Step 4: A tree may involve multiple correct paths where subtasks are independent of each "
    "other. In such cases, a subtask may appear twice in different parts of the tree. Number such "
    "occurrences distinctly, e.g., Subtask1(1), Subtask1(2), ensuring clarity.\n"
    "5. Step 5: Some tasks may have multiple valid approaches. For example, replacing a cat with a "
    "pink dog can be done in two ways:\n"
    "   - Object Replacement (Cat -> Pink Dog)\n"
    "   - Object Replacement (Cat -> Dog) -> Object Recoloration (Dog -> Pink Dog)\n";

constexpr const char* kConstraints =
    "\n## Logical Constraints & Dependencies\n"
    "- Ensure proper ordering, e.g., if an object is replaced and then segmented, segmentation "
    "must follow replacement.\n"
    "- Operations should be structured logically so that every subtask builds upon the previous "
    "one.\n";

constexpr const char* kFormat =
    "\n## Expected Output Format\n"
    "The model should output the subtask tree in structured JSON format, where each node "
    "contains:\n"
    "- Subtask Name (with object label if applicable)\n"
    "- Parent Node (Parent subtask from which it depends)\n"
    "- Execution Order (Logical flow of tasks)\n";

constexpr const char* kExample =
    "\n## Example Input & Expected Output\n"
    "Input Prompt: \"Detect the pedestrians, remove the car and replacement the cat with rabbit "
    "and recolor the dog to pink.\"\n"
    "Expected Subtask Tree:\n"
    "{\n"
    "  \"task\": \"Detect the pedestrians, remove the car and replacement the cat with rabbit and "
    "recolor the dog to pink\",\n"
    "  \"subtask_tree\": [\n"
    "    {\"subtask\": \"Object Detection (Pedestrian)(1)\", \"parent\": []},\n"
    "    {\"subtask\": \"Object Removal (Car)(2)\", \"parent\": [\"Object Detection (Pedestrian)(1)\"]},\n"
    "    {\"subtask\": \"Object Replacement (Cat -> Rabbit)(3)\", \"parent\": [\"Object Removal (Car)(2)\"]},\n"
    "    {\"subtask\": \"Object Replacement (Cat -> Rabbit)(4)\", \"parent\": [\"Object Detection (Pedestrian)(1)\"]},\n"
    "    {\"subtask\": \"Object Removal (Car)(5)\", \"parent\": [\"Object Replacement (Cat -> Rabbit)(4)\"]},\n"
    "    {\"subtask\": \"Object Recoloration (Dog -> Pink Dog)(6)\", \"parent\": "
    "[\"Object Replacement (Cat -> Rabbit)(3)\", \"Object Removal (Car)(5)\"]}\n"
    "  ]\n"
    "}\n";

constexpr const char* kFinal =
    "\n## Final Task\n"
    "Now, using the given input image and prompt, generate a well-structured subtask tree that "
    "adheres to the principles outlined above.\n"
    "- Ensure logical ordering and clear dependencies.\n"
    "- Label subtasks by object name where needed.\n"
    "- Structure the output as a JSON-formatted subtask tree.\n";

bool blank(const std::string& s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

PlannerPrompt build_planner_prompt(const std::string& task_text,
                                   const std::vector<SubtaskKind>& vocabulary) {
  if (blank(task_text)) throw Error(ErrorCode::EmptyTask, "task text is empty");

  std::ostringstream out;
  out << kPreamble << kUnderstanding << kSteps << kConstraints;
  out << "\n## Supported Subtasks\n"
      << "Below is the complete list of available subtasks: ";
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    if (i) out << ", ";
    out << vocabulary[i].name();
  }
  out << "\nYou must strictly use only these subtasks when constructing the tree.\n";
  out << kFormat << kExample << kFinal;
  out << "\nInput Details:\n"
      << "- Image: " << kImagePlaceholder << "\n"
      << "- Prompt: " << task_text << "\n"
      << "- Supported Subtasks: (See the list above)\n"
      << "\nNow, generate the correct subtask tree. Before you generate the tree, ensure that for "
         "every possible path, all required subtasks are included and none are skipped.\n";
  return PlannerPrompt{out.str()};
}

std::string StubPlannerClient::complete(const PlannerPrompt&) {
  try {
    return read_text_file(path_);
  } catch (const Error& e) {
    throw Error(ErrorCode::TransportError, e.what());
  }
}

HttpPlannerClient::HttpPlannerClient(std::string base_url) : url_(std::move(base_url)) {
  constexpr std::string_view scheme = "http://";
  if (url_.rfind(scheme, 0) != 0) {
    throw Error(ErrorCode::EndpointUnavailable, "only http:// endpoints are supported: '" + url_ + "'");
  }
  const std::string rest = url_.substr(scheme.size());
  const auto slash = rest.find('/');
  host_port_ = rest.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  if (host_port_.empty()) throw Error(ErrorCode::EndpointUnavailable, "no host in '" + url_ + "'");
}

std::string HttpPlannerClient::complete(const PlannerPrompt& prompt) {
  httplib::Client client("http://" + host_port_);
  client.set_connection_timeout(5);
  client.set_read_timeout(120);

  const std::string body = nlohmann::json{{"prompt", prompt.text}}.dump();
  auto res = client.Post(path_, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::TransportError, "POST " + url_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::TransportError, "POST " + url_ + ": HTTP " + std::to_string(res->status));
  }
  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::TransportError, std::string("malformed planner response: ") + e.what());
  }
}

std::unique_ptr<PlannerClient> planner_client_from_env() {
  const char* url = std::getenv(kPlannerUrlEnv);
  if (!url || !*url) return nullptr;
  return std::make_unique<HttpPlannerClient>(url);
}

std::string request_tree(PlannerClient* client, const PlannerPrompt& prompt) {
  if (!client) {
    throw Error(ErrorCode::EndpointUnavailable,
                std::string("no planner endpoint configured (set ") + kPlannerUrlEnv + ")");
  }
  return client->complete(prompt);
}

}  // namespace costa

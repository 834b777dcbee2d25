#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace costa {

enum class ErrorCode {
  ParseError,
  UnknownSubtask,
  DuplicateEntry,
  MissingBenchmark,
  NegativeTime,
  NonPositiveQuality,
  EmptyTask,
  DanglingParent,
  CycleDetected,
  EndpointUnavailable,
  TransportError,
  NoToolForSubtask,
  UnsatisfiableDependency,
  PathExplosion,
  QueueOverflow,
  SearchExhausted,
  ScriptGap,
  EmptyRecord,
  InvalidScore,
  AlphaOutOfRange,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure surfaced by the library carries one of the codes above so
/// callers (the CLI in particular) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace costa

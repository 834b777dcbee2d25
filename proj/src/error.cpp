#include "costa/error.hpp"

namespace costa {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownSubtask: return "UnknownSubtask";
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::MissingBenchmark: return "MissingBenchmark";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::NonPositiveQuality: return "NonPositiveQuality";
    case ErrorCode::EmptyTask: return "EmptyTask";
    case ErrorCode::DanglingParent: return "DanglingParent";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::EndpointUnavailable: return "EndpointUnavailable";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::NoToolForSubtask: return "NoToolForSubtask";
    case ErrorCode::UnsatisfiableDependency: return "UnsatisfiableDependency";
    case ErrorCode::PathExplosion: return "PathExplosion";
    case ErrorCode::QueueOverflow: return "QueueOverflow";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::ScriptGap: return "ScriptGap";
    case ErrorCode::EmptyRecord: return "EmptyRecord";
    case ErrorCode::InvalidScore: return "InvalidScore";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace costa

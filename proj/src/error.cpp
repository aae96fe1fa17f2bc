#include "maxcucl/error.hpp"

namespace maxcucl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::NodeIndexOutOfRange: return "NodeIndexOutOfRange";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::NotStronglyConnected: return "NotStronglyConnected";
    case ErrorCode::GenerationBudgetExhausted: return "GenerationBudgetExhausted";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownEdgeInSchedule: return "UnknownEdgeInSchedule";
    case ErrorCode::UnknownInNeighbor: return "UnknownInNeighbor";
    case ErrorCode::CalledOffPhase: return "CalledOffPhase";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DesyncDetected: return "DesyncDetected";
    case ErrorCode::ValidityViolated: return "ValidityViolated";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace maxcucl

#include "msm/errors.hpp"

namespace msm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleError: return "CycleError";
    case ErrorCode::KindViolation: return "KindViolation";
    case ErrorCode::ViewViolation: return "ViewViolation";
    case ErrorCode::MappingViolation: return "MappingViolation";
    case ErrorCode::TerminalViolation: return "TerminalViolation";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnknownView: return "UnknownView";
    case ErrorCode::DuplicateNode: return "DuplicateNode";
    case ErrorCode::InvalidName: return "InvalidName";
    case ErrorCode::NoRoute: return "NoRoute";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::MissingWindowColumn: return "MissingWindowColumn";
    case ErrorCode::DuplicateEquivalenceColumn: return "DuplicateEquivalenceColumn";
    case ErrorCode::BadWindowLabel: return "BadWindowLabel";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NoDataForView: return "NoDataForView";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooManyPlayers: return "TooManyPlayers";
    case ErrorCode::ViewMismatch: return "ViewMismatch";
    case ErrorCode::UnknownAlert: return "UnknownAlert";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::IoError: return "IoError";
  }
  return "Error";
}

namespace {

std::string format_what(ErrorCode code, const std::string& message,
                        const std::optional<SourcePos>& pos) {
  std::string out;
  if (pos) {
    out += std::to_string(pos->line) + ":" + std::to_string(pos->column) + ": ";
  }
  out += to_string(code);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string message, std::optional<SourcePos> pos)
    : std::runtime_error(format_what(code, message, pos)),
      code_(code),
      detail_(std::move(message)),
      pos_(pos) {}

Error Error::at(SourcePos pos) const {
  if (pos_) return *this;
  return Error(code_, detail_, pos);
}

}  // namespace msm

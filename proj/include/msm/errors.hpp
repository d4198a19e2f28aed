#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace msm {

enum class ErrorCode {
  // map-core
  CycleError,
  KindViolation,
  ViewViolation,
  MappingViolation,
  TerminalViolation,
  UnknownNode,
  UnknownView,
  DuplicateNode,
  InvalidName,
  NoRoute,
  // msm-format
  SyntaxError,
  // dataset
  MissingWindowColumn,
  DuplicateEquivalenceColumn,
  BadWindowLabel,
  EmptyWindow,
  NoDataForView,
  // mechanisms
  EmptyTable,
  StateSpaceTooLarge,
  LengthMismatch,
  NotNormalized,
  InsufficientData,
  InvalidArgument,
  // attribution
  TooManyPlayers,
  // traversal
  ViewMismatch,
  UnknownAlert,
  // simulator
  UnknownScenario,
  // plumbing
  IoError,
};

std::string_view to_string(ErrorCode code);

/// 1-based source position inside a `.msm` document.
struct SourcePos {
  int line = 0;
  int column = 0;
};

/// Domain error. Every failure the library reports is one of these; the CLI
/// maps IoError to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::optional<SourcePos> pos = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::optional<SourcePos>& pos() const noexcept { return pos_; }

  /// Same error with a source position attached (no-op if one is set).
  Error at(SourcePos pos) const;

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<SourcePos> pos_;
};

}  // namespace msm

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace equivfuse {

/// Every failure the tool can report. The CLI maps all of these to exit
/// code 3; solver-side failures never surface as exceptions but as Unknown
/// verdicts.
enum class ErrorKind {
  // Frontends.
  SyntaxError,
  UnsupportedConstruct,
  DuplicateDefinition,
  StaticOutOfBounds,
  NonConstantBound,
  UseBeforeDecl,
  TypeMismatch,
  UnassignedOutput,
  DynamicOutOfBounds,
  SchemaError,
  ShapeMismatch,
  UnknownOp,
  // Netlist elaboration.
  UnknownCell,
  UnconnectedPin,
  UndrivenNet,
  MultipleDrivers,
  CombinationalLoop,
  WidthMismatch,
  TopNotFound,
  // Core.
  TripCountOverflow,
  HasState,
  InvalidModule,
  // Miter.
  CountMismatch,
  NameMissing,
  DirectionMismatch,
  NeedsUnrollDepth,
  // Backends and solving.
  MultiOutput,
  ParseFailure,
  SpawnFailure,
  // Session.
  ConflictingDirective,
  UnsupportedFrontend,
  Usage,
  Io,
};

std::string_view errorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(std::string(errorKindName(kind)) + ": " + message),
        kind_(kind), detail_(message) {}

  ErrorKind kind() const { return kind_; }
  /// Message without the kind prefix.
  const std::string &detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &message) {
  throw Error(kind, message);
}

/// A source position for frontend diagnostics (1-based).
struct SourceLoc {
  unsigned line = 0;
  unsigned col = 0;
};

std::string formatLoc(std::string_view file, SourceLoc loc);

} // namespace equivfuse

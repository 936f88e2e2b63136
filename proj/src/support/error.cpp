#include "equivfuse/support/error.h"

namespace equivfuse {

std::string_view errorKindName(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::SyntaxError: return "SyntaxError";
  case ErrorKind::UnsupportedConstruct: return "UnsupportedConstruct";
  case ErrorKind::DuplicateDefinition: return "DuplicateDefinition";
  case ErrorKind::StaticOutOfBounds: return "StaticOutOfBounds";
  case ErrorKind::NonConstantBound: return "NonConstantBound";
  case ErrorKind::UseBeforeDecl: return "UseBeforeDecl";
  case ErrorKind::TypeMismatch: return "TypeMismatch";
  case ErrorKind::UnassignedOutput: return "UnassignedOutput";
  case ErrorKind::DynamicOutOfBounds: return "DynamicOutOfBounds";
  case ErrorKind::SchemaError: return "SchemaError";
  case ErrorKind::ShapeMismatch: return "ShapeMismatch";
  case ErrorKind::UnknownOp: return "UnknownOp";
  case ErrorKind::UnknownCell: return "UnknownCell";
  case ErrorKind::UnconnectedPin: return "UnconnectedPin";
  case ErrorKind::UndrivenNet: return "UndrivenNet";
  case ErrorKind::MultipleDrivers: return "MultipleDrivers";
  case ErrorKind::CombinationalLoop: return "CombinationalLoop";
  case ErrorKind::WidthMismatch: return "WidthMismatch";
  case ErrorKind::TopNotFound: return "TopNotFound";
  case ErrorKind::TripCountOverflow: return "TripCountOverflow";
  case ErrorKind::HasState: return "HasState";
  case ErrorKind::InvalidModule: return "InvalidModule";
  case ErrorKind::CountMismatch: return "CountMismatch";
  case ErrorKind::NameMissing: return "NameMissing";
  case ErrorKind::DirectionMismatch: return "DirectionMismatch";
  case ErrorKind::NeedsUnrollDepth: return "NeedsUnrollDepth";
  case ErrorKind::MultiOutput: return "MultiOutput";
  case ErrorKind::ParseFailure: return "ParseFailure";
  case ErrorKind::SpawnFailure: return "SpawnFailure";
  case ErrorKind::ConflictingDirective: return "ConflictingDirective";
  case ErrorKind::UnsupportedFrontend: return "UnsupportedFrontend";
  case ErrorKind::Usage: return "Usage";
  case ErrorKind::Io: return "Io";
  }
  return "Error";
}

std::string formatLoc(std::string_view file, SourceLoc loc) {
  std::string out(file);
  if (!out.empty())
    out += ':';
  out += std::to_string(loc.line) + ':' + std::to_string(loc.col);
  return out;
}

} // namespace equivfuse

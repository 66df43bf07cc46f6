#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace asmweave {

enum class ErrorCode {
  UnknownFunction,
  ArityMismatch,
  InconsistentUpdateSet,
  KindViolation,
  SyntaxError,
  ResolveError,
  UnboundVariable,
  BackgroundError,
  GuardNotBoolean,
  RangeNotSet,
  CallDepthExceeded,
  ScriptViolation,
  BranchBudgetExceeded,
  UnboundedAbstract,
  RecursiveCall,
  NotPGA,
  SpaceTooLarge,
  ManifestError,
  ScenarioError,
  IoError,
};

std::string_view to_string(ErrorCode code);

struct SourcePos {
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }
  std::string to_string() const;
};

struct Diagnostic {
  SourcePos pos;
  ErrorCode code = ErrorCode::SyntaxError;
  std::string message;

  std::string to_string() const;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, SourcePos pos = {});

  ErrorCode code() const { return code_; }
  const SourcePos& pos() const { return pos_; }
  const std::string& message() const { return message_; }

 protected:
  Error(ErrorCode code, std::string message, SourcePos pos, const std::string& what);

 private:
  ErrorCode code_;
  SourcePos pos_;
  std::string message_;
};

// Thrown by the parser; carries every diagnostic found, not just the first.
class ParseError : public Error {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace asmweave

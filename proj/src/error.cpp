#include "asmweave/error.hpp"

namespace asmweave {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::InconsistentUpdateSet: return "InconsistentUpdateSet";
    case ErrorCode::KindViolation: return "KindViolation";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ResolveError: return "ResolveError";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::BackgroundError: return "BackgroundError";
    case ErrorCode::GuardNotBoolean: return "GuardNotBoolean";
    case ErrorCode::RangeNotSet: return "RangeNotSet";
    case ErrorCode::CallDepthExceeded: return "CallDepthExceeded";
    case ErrorCode::ScriptViolation: return "ScriptViolation";
    case ErrorCode::BranchBudgetExceeded: return "BranchBudgetExceeded";
    case ErrorCode::UnboundedAbstract: return "UnboundedAbstract";
    case ErrorCode::RecursiveCall: return "RecursiveCall";
    case ErrorCode::NotPGA: return "NotPGA";
    case ErrorCode::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::ScenarioError: return "ScenarioError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string SourcePos::to_string() const {
  return std::to_string(line) + ":" + std::to_string(column);
}

std::string Diagnostic::to_string() const {
  std::string out;
  if (pos.known()) out += pos.to_string() + ": ";
  out += std::string(asmweave::to_string(code)) + ": " + message;
  return out;
}

namespace {

std::string render(ErrorCode code, const std::string& message, SourcePos pos) {
  return Diagnostic{pos, code, message}.to_string();
}

std::string render_all(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    if (!out.empty()) out += "\n";
    out += d.to_string();
  }
  return out;
}

ErrorCode first_code(const std::vector<Diagnostic>& ds) {
  return ds.empty() ? ErrorCode::SyntaxError : ds.front().code;
}

}  // namespace

Error::Error(ErrorCode code, std::string message, SourcePos pos)
    : std::runtime_error(render(code, message, pos)), code_(code), pos_(pos), message_(std::move(message)) {}

Error::Error(ErrorCode code, std::string message, SourcePos pos, const std::string& what)
    : std::runtime_error(what), code_(code), pos_(pos), message_(std::move(message)) {}

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : Error(first_code(diagnostics), render_all(diagnostics),
            diagnostics.empty() ? SourcePos{} : diagnostics.front().pos, render_all(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

}  // namespace asmweave

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace prism {

/// 1-based source position.
struct Span {
  int line = 0;
  int column = 0;

  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

enum class ErrorCode {
  // syntax
  IllegalCharacter,
  UnterminatedString,
  UnexpectedToken,
  MissingHeader,
  EmptyBinderList,
  DanglingPipe,
  DuplicateBinder,
  // kernel
  KindMismatch,
  // contexts
  DuplicateName,
  UnknownParentContext,
  UnresolvedReference,
  RecursiveAlias,
  RoleCycle,
  NotFound,
  CategoryArity,
  // typing
  NotAFunction,
  ArgumentMismatch,
  NotPolymorphic,
  UnboundVariable,
  // eval
  FuelExhausted,
  ShapeMismatch,
  NotDecodable,
  // runtime
  ScenarioParse,
  UnknownExternal,
  UnboundExternalResult,
  UnitMismatch,
  NotAnAction,
  MissingArgument,
  // analyze
  TooManySites,
  UnknownSiteReference,
};

/// Stable diagnostic code, e.g. "E203".
std::string_view errorCodeId(ErrorCode code);

/// Every failure in the library is reported as a prism::Error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::optional<Span> span = std::nullopt)
      : std::runtime_error(std::move(message)), code_(code), span_(span) {}

  ErrorCode code() const noexcept { return code_; }
  const std::optional<Span>& span() const noexcept { return span_; }

  /// Source file the error belongs to, when known.
  const std::string& file() const noexcept { return file_; }
  Error& inFile(std::string file) {
    if (file_.empty()) file_ = std::move(file);
    return *this;
  }

 private:
  ErrorCode code_;
  std::optional<Span> span_;
  std::string file_;
};

/// `file:line:col: error[EXXX]: message`; the error's own file wins over `file`.
std::string formatDiagnostic(std::string_view file, const Error& error);

}  // namespace prism

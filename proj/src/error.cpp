#include "prism/error.hpp"

#include <sstream>

namespace prism {

std::string_view errorCodeId(ErrorCode code) {
  switch (code) {
    case ErrorCode::IllegalCharacter: return "E001";
    case ErrorCode::UnterminatedString: return "E002";
    case ErrorCode::UnexpectedToken: return "E003";
    case ErrorCode::MissingHeader: return "E004";
    case ErrorCode::EmptyBinderList: return "E005";
    case ErrorCode::DanglingPipe: return "E006";
    case ErrorCode::DuplicateBinder: return "E007";
    case ErrorCode::KindMismatch: return "E101";
    case ErrorCode::DuplicateName: return "E201";
    case ErrorCode::UnknownParentContext: return "E202";
    case ErrorCode::UnresolvedReference: return "E203";
    case ErrorCode::RecursiveAlias: return "E204";
    case ErrorCode::RoleCycle: return "E205";
    case ErrorCode::NotFound: return "E206";
    case ErrorCode::CategoryArity: return "E207";
    case ErrorCode::NotAFunction: return "E301";
    case ErrorCode::ArgumentMismatch: return "E302";
    case ErrorCode::NotPolymorphic: return "E303";
    case ErrorCode::UnboundVariable: return "E304";
    case ErrorCode::FuelExhausted: return "E401";
    case ErrorCode::ShapeMismatch: return "E402";
    case ErrorCode::NotDecodable: return "E403";
    case ErrorCode::ScenarioParse: return "E501";
    case ErrorCode::UnknownExternal: return "E502";
    case ErrorCode::UnboundExternalResult: return "E503";
    case ErrorCode::UnitMismatch: return "E504";
    case ErrorCode::NotAnAction: return "E505";
    case ErrorCode::MissingArgument: return "E506";
    case ErrorCode::TooManySites: return "E601";
    case ErrorCode::UnknownSiteReference: return "E602";
  }
  return "E000";
}

std::string formatDiagnostic(std::string_view file, const Error& error) {
  std::ostringstream out;
  out << (error.file().empty() ? file : std::string_view(error.file()));
  if (error.span()) out << ':' << error.span()->line << ':' << error.span()->column;
  out << ": error[" << errorCodeId(error.code()) << "]: " << error.what();
  return out.str();
}

}  // namespace prism

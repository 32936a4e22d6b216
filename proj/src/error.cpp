#include "rsindy/error.hpp"

namespace rsindy {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DegenerateFeature: return "DegenerateFeature";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateTarget: return "DegenerateTarget";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ExpertError: return "ExpertError";
    case ErrorCode::NumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

namespace {
std::string decorate(ErrorCode code, const std::string& message) {
  std::string out(to_string(code));
  out += ": ";
  out += message;
  return out;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> detail)
    : std::runtime_error(decorate(code, message)), code_(code), detail_(detail) {}

}  // namespace rsindy

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rsindy {

enum class ErrorCode {
  InvalidInput,
  DegenerateFeature,
  InvalidPlan,
  SingularSystem,
  InsufficientData,
  DegenerateTarget,
  DegenerateLabels,
  InvalidConfig,
  IoError,
  SchemaError,
  ParseError,
  ExpertError,
  NumericFailure,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. `detail()` carries the offending line number for
/// ParseError and the expert index for ExpertError.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> detail = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message,
                              std::optional<std::size_t> detail = std::nullopt) {
  throw Error(code, message, detail);
}

}  // namespace rsindy

#ifndef NAP_ERROR_HPP
#define NAP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace nap {

enum class ErrorCode {
  BoundTooSmall,
  BoundTooLarge,
  WrongMode,
  EmptySnapshot,
  ConditionNull,
  DivisionUndefined,
  BudgetExhausted,
  EnumerationExhausted,
  MarkerMissing,
  MissingSubsetBound,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure the engine reports carries one of the codes above.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace nap

#endif

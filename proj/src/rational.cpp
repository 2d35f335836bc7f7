#include "nap/rational.hpp"

#include "nap/error.hpp"

namespace nap {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::BoundTooSmall: return "BoundTooSmall";
  case ErrorCode::BoundTooLarge: return "BoundTooLarge";
  case ErrorCode::WrongMode: return "WrongMode";
  case ErrorCode::EmptySnapshot: return "EmptySnapshot";
  case ErrorCode::ConditionNull: return "ConditionNull";
  case ErrorCode::DivisionUndefined: return "DivisionUndefined";
  case ErrorCode::BudgetExhausted: return "BudgetExhausted";
  case ErrorCode::EnumerationExhausted: return "EnumerationExhausted";
  case ErrorCode::MarkerMissing: return "MarkerMissing";
  case ErrorCode::MissingSubsetBound: return "MissingSubsetBound";
  case ErrorCode::ParseError: return "ParseError";
  case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::DivisionUndefined, "zero denominator");
  Rational q{mpz_class(std::to_string(num)), mpz_class(std::to_string(den))};
  q.canonicalize();
  return q;
}

Rational count_ratio(std::size_t num, std::size_t den) {
  if (den == 0) throw Error(ErrorCode::DivisionUndefined, "zero denominator");
  Rational q{mpz_class(std::to_string(num)), mpz_class(std::to_string(den))};
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto slash = s.find('/');
  try {
    Integer num(slash == std::string::npos ? s : s.substr(0, slash));
    Integer den(slash == std::string::npos ? std::string("1") : s.substr(slash + 1));
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + s + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::ParseError, "bad rational '" + s + "'");
  }
}

} // namespace nap

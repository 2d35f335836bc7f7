#ifndef NAP_SET_VALUE_HPP
#define NAP_SET_VALUE_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nap {

enum class ValueKind : std::uint8_t {
  Ordinal,   // omega * a + b
  Atom,      // non-ordinal urelement used for padding in ordinal universes
  Set,       // finite set of values; "pure" when hereditarily finite
  Intension, // infinite member of a power class, known by its defining rule
};

/// A universe element with a canonical textual code.
///
/// Two values are equal iff their codes are identical. Codes:
///   ordinals    0, 7, w, w+3, w*2, w*2+5
///   atoms       u0, u1, ...
///   sets        {} or {c1,c2,...} with members in canonical order
///   intensions  P[Class]{m1,...}#i  (markers plus the tail of Class from
///               enumeration index i onward)
///
/// Values are immutable and cheap to copy.
class SetValue {
public:
  SetValue();  // the empty set

  static SetValue empty_set() { return SetValue(); }
  static SetValue set_of(std::vector<SetValue> members);
  static SetValue ordinal(std::uint64_t omega_coeff, std::uint64_t finite);
  static SetValue natural(std::uint64_t n) { return ordinal(0, n); }
  static SetValue atom(std::uint64_t index);
  static SetValue intension(std::string class_name, std::vector<SetValue> markers,
                            std::uint64_t tail_index);

  ValueKind kind() const noexcept;
  const std::string& code() const noexcept;

  bool is_ordinal() const noexcept { return kind() == ValueKind::Ordinal; }
  bool is_set() const noexcept { return kind() == ValueKind::Set; }
  // Hereditarily finite and built only from sets.
  bool is_pure() const noexcept;

  // Set members, or intension markers.
  std::span<const SetValue> members() const noexcept;
  bool has_member(const SetValue& x) const;

  // Ordinal parts (omega * omega_coeff + finite_part).
  std::uint64_t omega_coeff() const noexcept;
  std::uint64_t finite_part() const noexcept;
  bool is_limit() const noexcept;

  std::uint64_t atom_index() const noexcept;

  const std::string& intension_class() const noexcept;
  std::uint64_t intension_tail() const noexcept;

  friend bool operator==(const SetValue& a, const SetValue& b) noexcept;
  friend std::strong_ordering operator<=>(const SetValue& a, const SetValue& b) noexcept;

private:
  struct Rep;
  static const std::shared_ptr<const Rep>& empty_rep();
  explicit SetValue(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

// Von Neumann rank of a pure set. Throws WrongMode otherwise.
std::uint64_t rank(const SetValue& x);

// Ordinal addition alpha + beta (not commutative).
SetValue ordinal_add(const SetValue& alpha, const SetValue& beta);

// Ackermann bijection between naturals and hereditarily finite sets:
// j is a member of hf_from_index(i) iff bit j of i is set.
SetValue hf_from_index(std::uint64_t index);
// Index of a pure set, when it fits in 64 bits.
std::optional<std::uint64_t> hf_index(const SetValue& x);

// |V_n| for n <= 5; larger levels do not fit a 64-bit count.
std::uint64_t hf_level_size(unsigned n);

// Parses the canonical code syntax; whitespace is ignored. Throws ParseError.
SetValue parse_value(std::string_view text);

// Sorted, duplicate-free.
std::vector<SetValue> canonical(std::vector<SetValue> values);

} // namespace nap

template <>
struct std::hash<nap::SetValue> {
  std::size_t operator()(const nap::SetValue& v) const noexcept {
    return std::hash<std::string>{}(v.code());
  }
};

#endif

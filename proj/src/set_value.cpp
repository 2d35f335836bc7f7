#include "nap/set_value.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "nap/error.hpp"

namespace nap {

struct SetValue::Rep {
  ValueKind kind = ValueKind::Set;
  std::uint64_t a = 0; // omega coefficient, atom index, or intension tail
  std::uint64_t b = 0; // finite part
  std::vector<SetValue> members;
  std::string class_name;
  std::string code;
  bool pure = true;
};

namespace {

std::string ordinal_code(std::uint64_t a, std::uint64_t b) {
  if (a == 0) return std::to_string(b);
  std::string s = "w";
  if (a > 1) s += "*" + std::to_string(a);
  if (b > 0) s += "+" + std::to_string(b);
  return s;
}

std::string join_codes(std::span<const SetValue> xs) {
  std::string s = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += xs[i].code();
  }
  s += '}';
  return s;
}

} // namespace

const std::shared_ptr<const SetValue::Rep>& SetValue::empty_rep() {
  static const auto rep = [] {
    auto r = std::make_shared<SetValue::Rep>();
    r->code = "{}";
    return std::shared_ptr<const SetValue::Rep>(std::move(r));
  }();
  return rep;
}

SetValue::SetValue() : rep_(empty_rep()) {}

std::vector<SetValue> canonical(std::vector<SetValue> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

SetValue SetValue::set_of(std::vector<SetValue> members) {
  if (members.empty()) return SetValue();
  auto r = std::make_shared<Rep>();
  r->kind = ValueKind::Set;
  r->members = canonical(std::move(members));
  r->pure = std::all_of(r->members.begin(), r->members.end(),
                        [](const SetValue& m) { return m.is_pure(); });
  r->code = join_codes(r->members);
  return SetValue(std::move(r));
}

SetValue SetValue::ordinal(std::uint64_t omega_coeff, std::uint64_t finite) {
  auto r = std::make_shared<Rep>();
  r->kind = ValueKind::Ordinal;
  r->a = omega_coeff;
  r->b = finite;
  r->pure = false;
  r->code = ordinal_code(omega_coeff, finite);
  return SetValue(std::move(r));
}

SetValue SetValue::atom(std::uint64_t index) {
  auto r = std::make_shared<Rep>();
  r->kind = ValueKind::Atom;
  r->a = index;
  r->pure = false;
  r->code = "u" + std::to_string(index);
  return SetValue(std::move(r));
}

SetValue SetValue::intension(std::string class_name, std::vector<SetValue> markers,
                             std::uint64_t tail_index) {
  if (class_name.empty() || class_name.find_first_of("[]") != std::string::npos)
    throw Error(ErrorCode::ParseError, "bad intension class name '" + class_name + "'");
  auto r = std::make_shared<Rep>();
  r->kind = ValueKind::Intension;
  r->a = tail_index;
  r->members = canonical(std::move(markers));
  r->class_name = std::move(class_name);
  r->pure = false;
  r->code = "P[" + r->class_name + "]" + join_codes(r->members) + "#" + std::to_string(tail_index);
  return SetValue(std::move(r));
}

ValueKind SetValue::kind() const noexcept { return rep_->kind; }
const std::string& SetValue::code() const noexcept { return rep_->code; }
bool SetValue::is_pure() const noexcept { return rep_->pure; }
std::span<const SetValue> SetValue::members() const noexcept { return rep_->members; }

bool SetValue::has_member(const SetValue& x) const {
  return std::binary_search(rep_->members.begin(), rep_->members.end(), x);
}

std::uint64_t SetValue::omega_coeff() const noexcept { return rep_->a; }
std::uint64_t SetValue::finite_part() const noexcept { return rep_->b; }
bool SetValue::is_limit() const noexcept {
  return rep_->kind == ValueKind::Ordinal && rep_->a > 0 && rep_->b == 0;
}
std::uint64_t SetValue::atom_index() const noexcept { return rep_->a; }
const std::string& SetValue::intension_class() const noexcept { return rep_->class_name; }
std::uint64_t SetValue::intension_tail() const noexcept { return rep_->a; }

bool operator==(const SetValue& x, const SetValue& y) noexcept {
  return x.rep_ == y.rep_ || x.rep_->code == y.rep_->code;
}

std::strong_ordering operator<=>(const SetValue& x, const SetValue& y) noexcept {
  if (x.rep_ == y.rep_) return std::strong_ordering::equal;
  const auto& p = *x.rep_;
  const auto& q = *y.rep_;
  if (p.kind != q.kind) return p.kind <=> q.kind;
  switch (p.kind) {
  case ValueKind::Ordinal:
    if (auto c = p.a <=> q.a; c != 0) return c;
    return p.b <=> q.b;
  case ValueKind::Atom:
    return p.a <=> q.a;
  case ValueKind::Set:
    return std::lexicographical_compare_three_way(p.members.begin(), p.members.end(),
                                                  q.members.begin(), q.members.end());
  case ValueKind::Intension:
    if (auto c = p.class_name <=> q.class_name; c != 0) return c;
    if (auto c = std::lexicographical_compare_three_way(p.members.begin(), p.members.end(),
                                                        q.members.begin(), q.members.end());
        c != 0)
      return c;
    return p.a <=> q.a;
  }
  return std::strong_ordering::equal;
}

std::uint64_t rank(const SetValue& x) {
  if (!x.is_pure()) throw Error(ErrorCode::WrongMode, "rank of non-HF value " + x.code());
  std::uint64_t r = 0;
  for (const auto& m : x.members()) r = std::max(r, rank(m) + 1);
  return r;
}

SetValue ordinal_add(const SetValue& alpha, const SetValue& beta) {
  if (!alpha.is_ordinal() || !beta.is_ordinal())
    throw Error(ErrorCode::WrongMode, "ordinal addition on " + alpha.code() + " + " + beta.code());
  if (beta.omega_coeff() > 0)
    return SetValue::ordinal(alpha.omega_coeff() + beta.omega_coeff(), beta.finite_part());
  return SetValue::ordinal(alpha.omega_coeff(), alpha.finite_part() + beta.finite_part());
}

namespace {

const std::array<SetValue, 64>& small_hf() {
  static const std::array<SetValue, 64> table = [] {
    std::array<SetValue, 64> t;
    for (std::uint64_t i = 0; i < 64; ++i) {
      std::vector<SetValue> ms;
      for (std::uint64_t j = 0; j < 6 && j < i; ++j)
        if (i >> j & 1U) ms.push_back(t[j]);
      t[i] = SetValue::set_of(std::move(ms));
    }
    return t;
  }();
  return table;
}

} // namespace

SetValue hf_from_index(std::uint64_t index) {
  if (index < 64) return small_hf()[index];
  std::vector<SetValue> ms;
  for (std::uint64_t j = 0; j < 64; ++j)
    if (index >> j & 1U) ms.push_back(small_hf()[j]);
  return SetValue::set_of(std::move(ms));
}

std::optional<std::uint64_t> hf_index(const SetValue& x) {
  if (!x.is_pure()) return std::nullopt;
  std::uint64_t idx = 0;
  for (const auto& m : x.members()) {
    auto j = hf_index(m);
    if (!j || *j >= 64) return std::nullopt;
    idx |= std::uint64_t{1} << *j;
  }
  return idx;
}

std::uint64_t hf_level_size(unsigned n) {
  static constexpr std::array<std::uint64_t, 6> sizes{0, 1, 2, 4, 16, 65536};
  if (n >= sizes.size()) throw Error(ErrorCode::BoundTooLarge, "|V_" + std::to_string(n) + "|");
  return sizes[n];
}

namespace {

class Parser {
public:
  explicit Parser(std::string_view text) {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) s_ += c;
  }

  SetValue parse_all() {
    SetValue v = value();
    if (pos_ != s_.size()) fail("trailing input");
    return v;
  }

private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::ParseError,
                why + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
  }
  bool eat(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  std::uint64_t number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected digits");
    try {
      return std::stoull(s_.substr(start, pos_ - start));
    } catch (const std::out_of_range&) {
      fail("number out of range");
    }
  }

  std::vector<SetValue> braced() {
    if (!eat('{')) fail("expected '{'");
    std::vector<SetValue> ms;
    if (eat('}')) return ms;
    do {
      ms.push_back(value());
    } while (eat(','));
    if (!eat('}')) fail("expected '}'");
    return ms;
  }

  SetValue value() {
    char c = peek();
    if (c == '{') return SetValue::set_of(braced());
    if (c == 'u') {
      ++pos_;
      return SetValue::atom(number());
    }
    if (c == 'w') {
      ++pos_;
      std::uint64_t a = 1, b = 0;
      if (eat('*')) a = number();
      if (eat('+')) b = number();
      if (a == 0) fail("w*0 is not canonical");
      return SetValue::ordinal(a, b);
    }
    if (c == 'P') {
      ++pos_;
      if (!eat('[')) fail("expected '['");
      std::size_t close = s_.find(']', pos_);
      if (close == std::string::npos) fail("unterminated class name");
      std::string name = s_.substr(pos_, close - pos_);
      pos_ = close + 1;
      auto markers = braced();
      if (!eat('#')) fail("expected '#'");
      return SetValue::intension(std::move(name), std::move(markers), number());
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return SetValue::natural(number());
    fail("unexpected character");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

} // namespace

SetValue parse_value(std::string_view text) { return Parser(text).parse_all(); }

} // namespace nap

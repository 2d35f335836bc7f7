#include <doctest.h>

#include <random>
#include <set>

#include "nap/error.hpp"
#include "nap/set_value.hpp"
#include "nap/universe.hpp"

using namespace nap;

namespace {
SetValue v(const char* code) { return parse_value(code); }

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::ValidationError;
}
} // namespace

TEST_CASE("hereditarily finite level sizes follow 2^|V_n|") {
  // independent recurrence
  std::uint64_t n = 0;
  for (unsigned lvl = 0; lvl <= 5; ++lvl) {
    CHECK(hf_level_size(lvl) == n);
    n = lvl == 0 ? 1 : (std::uint64_t{1} << n);
  }
  auto u = Universe::make(Mode::Hf, 4);
  REQUIRE(u.size());
  CHECK(*u.size() == 16);
  std::set<std::string> seen;
  for (std::uint64_t i = 0; i < 16; ++i) {
    auto x = u.element_at(i);
    REQUIRE(x);
    CHECK(u.contains(*x));
    CHECK(rank(*x) < 4);
    seen.insert(x->code());
  }
  CHECK(seen.size() == 16);
  CHECK_FALSE(u.element_at(16));
}

TEST_CASE("universe bounds") {
  CHECK(code_of([] { Universe::make(Mode::Hf, 2); }) == ErrorCode::BoundTooSmall);
  CHECK(code_of([] { Universe::make(Mode::Ordinal, 0); }) == ErrorCode::BoundTooSmall);
  CHECK(code_of([] { Universe::make(Mode::Hf, Universe::kMaxHfBound + 1); }) == ErrorCode::BoundTooLarge);

  auto u = Universe::make(Mode::Ordinal, 1);
  CHECK(u.contains(SetValue::natural(1000)));
  CHECK_FALSE(u.contains(v("w")));
  auto lim = u.limits();
  for (std::uint64_t i = 0; i < 200; ++i)
    if (auto x = u.element_at(i); x && x->is_ordinal()) CHECK_FALSE(lim.contains(*x));
}

TEST_CASE("von Neumann rank") {
  CHECK(rank(SetValue::empty_set()) == 0);
  CHECK(rank(v("{{}}")) == 1);
  CHECK(rank(v("{{{}},{}}")) == 2);
  CHECK(code_of([] { rank(v("w")); }) == ErrorCode::WrongMode);
}

TEST_CASE("Ackermann coding: j in hf(i) iff bit j of i") {
  for (std::uint64_t i = 0; i < 300; ++i) {
    auto x = hf_from_index(i);
    REQUIRE(hf_index(x));
    CHECK(*hf_index(x) == i);
    for (std::uint64_t j = 0; j < 9; ++j) CHECK(x.has_member(hf_from_index(j)) == (((i >> j) & 1) == 1));
  }
}

TEST_CASE("codes round-trip and order is total") {
  for (const char* c : {"0", "7", "w", "w+3", "w*2", "w*2+5", "u4", "{}", "{0,w,u1}", "{{},{{}}}"})
    CHECK(parse_value(c).code() == c);
  CHECK(parse_value(" { w , 0 } ").code() == "{0,w}");
  CHECK(code_of([] { parse_value("w+"); }) == ErrorCode::ParseError);
  CHECK(SetValue::natural(3) < v("w"));
  CHECK(v("w+9") < v("w*2"));
}

TEST_CASE("parity and limits") {
  auto u = Universe::make(Mode::Ordinal, 3);
  CHECK(u.even().contains(SetValue::natural(4)));
  CHECK_FALSE(u.even().contains(SetValue::natural(3)));
  CHECK(u.odd().contains(SetValue::natural(3)));
  CHECK(u.even().contains(v("w")));  // limits count as even
  CHECK(u.even().contains(v("w*2+2")));
  CHECK(u.odd().contains(v("w+1")));
  CHECK_FALSE(u.even().contains(v("u2")));
  CHECK_FALSE(u.odd().contains(v("u2")));

  std::vector<std::string> lims;
  for (std::uint64_t i = 0; i < 2000; ++i)
    if (auto x = u.element_at(i); x && u.limits().contains(*x)) lims.push_back(x->code());
  CHECK(lims == std::vector<std::string>{"w", "w*2"});
  CHECK_FALSE(u.limits().contains(SetValue::natural(0)));
  CHECK(u.successors().contains(SetValue::natural(1)));
  CHECK_FALSE(u.successors().contains(SetValue::natural(0)));
}

TEST_CASE("translation") {
  auto u = Universe::make(Mode::Ordinal, 3);
  auto nat = u.below(v("w"));
  auto shifted = translate_class(u, nat, SetValue::natural(1));
  CHECK_FALSE(shifted.contains(SetValue::natural(0)));
  for (std::uint64_t n = 1; n < 50; ++n) CHECK(shifted.contains(SetValue::natural(n)));
  CHECK_FALSE(shifted.contains(v("w")));

  auto same = translate_class(u, u.even(), SetValue::natural(0));
  for (std::uint64_t i = 0; i < 100; ++i)
    if (auto x = u.element_at(i)) CHECK(same.contains(*x) == u.even().contains(*x));

  auto single = translate_class(u, u.explicit_class({v("w")}), SetValue::natural(2));
  CHECK(single.contains(v("w+2")));
  CHECK_FALSE(single.contains(v("w")));
  CHECK(ordinal_add(SetValue::natural(1), v("w")) == v("w"));  // 1 + w = w
  CHECK(ordinal_add(v("w"), SetValue::natural(1)) == v("w+1"));
}

TEST_CASE("class algebra agrees with predicates on random values") {
  auto u = Universe::make(Mode::Ordinal, 3);
  std::mt19937_64 rng(7);
  auto a = u.even(), b = u.limits(), c = u.atoms();
  for (int i = 0; i < 500; ++i) {
    auto x = *u.element_at(rng() % 400);
    CHECK(u.union_of(a, c).contains(x) == (a.contains(x) || c.contains(x)));
    CHECK(u.intersection(a, b).contains(x) == (a.contains(x) && b.contains(x)));
    CHECK(u.difference(a, b).contains(x) == (a.contains(x) && !b.contains(x)));
    CHECK(u.complement(a).contains(x) == !a.contains(x));
  }
}

TEST_CASE("generators yield distinct members of their class") {
  auto u = Universe::make(Mode::Ordinal, 3);
  for (const auto& cls : {u.ordinals(), u.even(), u.odd(), u.atoms(), u.non_ordinals(), u.successors(),
                          u.power_class(u.ordinals()), u.finite_subsets(u.even())}) {
    std::set<std::string> seen;
    for (std::uint64_t i = 0; i < 40; ++i) {
      auto x = cls.element_at(i);
      if (!x) break;
      CHECK_MESSAGE(cls.contains(*x), cls.name() << " " << x->code());
      CHECK(seen.insert(x->code()).second);
    }
  }
}

TEST_CASE("inclusion and separators") {
  auto u = Universe::make(Mode::Ordinal, 3);
  CHECK(class_included(u, u.limits(), u.even()));
  CHECK(class_included(u, u.even(), u.ordinals()));
  CHECK_FALSE(class_included(u, u.ordinals(), u.even()));
  CHECK(class_included(u, u.atoms(), u.non_ordinals()));
  auto sep = find_separator(u.ordinals(), u.even());
  REQUIRE(sep);
  CHECK(u.odd().contains(*sep));
  CHECK(find_separator(u.non_ordinals(), u.atoms()));
}

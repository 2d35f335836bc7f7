#include <doctest.h>

#include <random>

#include "nap/error.hpp"
#include "nap/random_variable.hpp"
#include "nap/snapshot.hpp"

using namespace nap;

namespace {
SetValue n(std::uint64_t k) { return SetValue::natural(k); }
SetValue v(const char* code) { return parse_value(code); }
const auto id = RandomVariable::identity();

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

TEST_CASE("the parity permutation") {
  auto pi = invar_permutation();
  CHECK(pi(n(0)) == n(2));
  CHECK(pi(n(1)) == n(0));
  CHECK(pi(n(7)) == n(5));
  CHECK(pi(v("w")) == v("w"));
  CHECK(pi(v("u3")) == v("u3"));
  std::vector<SetValue> window;
  for (std::uint64_t k = 0; k < 200; ++k) window.push_back(n(k));
  CHECK(is_bijective_on(pi, window));
  for (std::uint64_t k = 0; k < 200; ++k) CHECK(*pi.preimage(pi(n(k))) == n(k));
}

TEST_CASE("window permutations are bijections; tables need not be") {
  auto w = std::vector<SetValue>{n(0), n(1), n(2)};
  auto rv = window_permutation("rot", w, {1, 2, 0});
  CHECK(rv(n(0)) == n(1));
  CHECK(rv(n(2)) == n(0));
  CHECK(rv(v("w")) == v("w"));
  CHECK(is_bijective_on(rv, w));
  CHECK(code_of([&] { window_permutation("bad", w, {0, 0, 1}); }) == ErrorCode::ValidationError);

  auto t = RandomVariable::table("t", {{n(0), n(5)}, {n(1), n(5)}});
  CHECK(t(n(0)) == n(5));
  CHECK(t(n(9)) == n(9));
  CHECK_FALSE(t.is_diagonal());
  CHECK_FALSE(is_bijective_on(t, w));
  auto td = RandomVariable::table("t", {{n(0), n(5)}}, n(7));
  CHECK(td(n(3)) == n(7));
}

TEST_CASE("snapshots are canonical") {
  Snapshot t{n(3), v("w"), n(0), n(3)};
  CHECK(t.size() == 3);
  CHECK(t.code() == "{0,3,w}");
  CHECK(parse_snapshot(t.code()) == t);
  CHECK(t.contains(v("w")));
  CHECK(t.intersect(Snapshot{n(3), n(4)}) == Snapshot{n(3)});
}

TEST_CASE("snapshot probabilities") {
  auto u = Universe::make(Mode::Ordinal, 3);
  auto pi = invar_permutation();
  CHECK(snapshot_prob(id, u.even(), {n(0), n(1), n(2), n(3), n(4)}) == count_ratio(3, 5));
  CHECK(snapshot_prob(id, u.everything(), {n(4), v("w"), v("u1")}) == 1);
  CHECK(snapshot_prob(pi, u.even(), {n(0), n(1), n(2), n(3)}) == count_ratio(3, 4));
  CHECK(code_of([&] { snapshot_prob(id, u.even(), Snapshot{}); }) == ErrorCode::EmptySnapshot);

  CHECK(joint_snapshot_prob(id, u.everything(), id, u.everything(), {n(1), n(2)}) == 1);
  CHECK(joint_snapshot_prob(id, u.even(), id, u.odd(), {n(0), n(1), n(2)}) == 0);
  CHECK(joint_snapshot_prob(id, u.even(), pi, u.even(), {n(0), n(1), n(2), n(3)}) == count_ratio(2, 4));

  CHECK(conditional_snapshot_prob(id, u.even(), id, u.ordinals(), {n(0), n(1), n(2), v("w")}) ==
        count_ratio(3, 4));
  CHECK(code_of([&] { conditional_snapshot_prob(id, u.even(), id, u.limits(), {n(0), n(1), n(2)}); }) ==
        ErrorCode::ConditionNull);
}

TEST_CASE("property: conditioning on V is the plain probability; joints are bounded by marginals") {
  auto u = Universe::make(Mode::Ordinal, 3);
  auto pi = invar_permutation();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SetValue> xs;
    std::size_t size = 1 + rng() % 12;
    for (std::size_t i = 0; i < size; ++i) xs.push_back(*u.element_at(rng() % 60));
    Snapshot t(xs);
    for (const auto& a : {u.even(), u.odd(), u.limits(), u.ordinals(), u.atoms()}) {
      Rational p = snapshot_prob(id, a, t);
      CHECK(conditional_snapshot_prob(id, a, id, u.everything(), t) == p);
      CHECK(p >= 0);
      CHECK(p <= 1);
      CHECK(snapshot_prob(id, u.complement(a), t) == 1 - p);
      Rational j = joint_snapshot_prob(id, a, pi, u.even(), t);
      CHECK(j <= p);
      CHECK(j <= snapshot_prob(pi, u.even(), t));
      // independent recount
      std::size_t hits = 0;
      for (const auto& s : t.states()) hits += a.contains(s);
      CHECK(p == count_ratio(hits, t.size()));
    }
  }
}

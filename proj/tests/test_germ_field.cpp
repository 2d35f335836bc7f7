#include <doctest.h>

#include <random>

#include "nap/error.hpp"
#include "nap/germ.hpp"
#include "nap/snapshot.hpp"

using namespace nap;

namespace {
SetValue n(std::uint64_t k) { return SetValue::natural(k); }
SetValue v(const char* code) { return parse_value(code); }
const auto id = RandomVariable::identity();

Snapshot random_snapshot(const Universe& u, std::mt19937_64& rng) {
  std::vector<SetValue> xs;
  std::size_t size = 1 + rng() % 10;
  for (std::size_t i = 0; i < size; ++i) xs.push_back(*u.element_at(rng() % 50));
  return Snapshot(xs);
}
} // namespace

TEST_CASE("event germs delegate to snapshot counting") {
  auto u = Universe::make(Mode::Ordinal, 3);
  CHECK(germ_of_event(id, u.even()).eval({n(0), n(1), n(2), n(3), n(4)}) == count_ratio(3, 5));
  CHECK(germ_of_event(id, u.everything()).eval({n(9), v("u0")}) == 1);
  CHECK(germ_of_event(id, u.explicit_class({v("w")})).eval({n(0), v("w"), v("w+1")}) == count_ratio(1, 3));
}

TEST_CASE("conditional germs") {
  auto u = Universe::make(Mode::Ordinal, 3);
  auto g = conditional_germ(id, u.even(), id, u.ordinals());
  CHECK(g.eval({n(0), n(1), v("w"), v("u0")}) == count_ratio(2, 3));
  auto e = conditional_germ(id, u.even(), id, u.everything());
  Snapshot t{n(0), n(1), n(2)};
  CHECK(e.eval(t) == germ_of_event(id, u.even()).eval(t));
  try {
    g.eval({v("u0"), v("u1")});
    FAIL("expected DivisionUndefined");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::DivisionUndefined);
  }
  CHECK_FALSE(g.try_eval({v("u0")}));
}

TEST_CASE("star sums") {
  auto u = Universe::make(Mode::Ordinal, 3);
  auto one = Germ::RationalFamily{"one", [](const SetValue&) { return Rational(1); }};
  CHECK(star_sum(one, u.empty_class()).eval({n(1), n(2)}) == 0);
  auto idx = u.explicit_class({n(1), n(2), n(3)});
  CHECK(star_sum(one, idx).eval({n(1), n(2), n(3), n(9)}) == 3);
  CHECK(star_sum(one, idx).eval({n(2), n(9)}) == 1);

  // perfect additivity on a finite partition of {0..5}
  std::vector<std::pair<SetValue, Germ>> parts;
  std::vector<std::vector<SetValue>> blocks{{n(0), n(3)}, {n(1)}, {n(2), n(4), n(5)}};
  for (std::size_t i = 0; i < blocks.size(); ++i)
    parts.emplace_back(n(i), germ_of_event(id, u.explicit_class(blocks[i])));
  auto all = germ_of_event(id, u.explicit_class({n(0), n(1), n(2), n(3), n(4), n(5)}));
  for (const Snapshot& t : {Snapshot{n(0), n(1), n(2)}, Snapshot{n(0), n(1), n(2), n(5), v("w")},
                            Snapshot{n(0), n(1), n(2), n(3), n(4), n(5), n(6)}})
    CHECK(Germ::star_sum(parts).eval(t) == all.eval(t));
}

TEST_CASE("property: germ arithmetic is pointwise field arithmetic") {
  auto u = Universe::make(Mode::Ordinal, 3);
  std::mt19937_64 rng(3);
  std::vector<Germ> atoms{germ_of_event(id, u.even()), germ_of_event(id, u.odd()),
                          germ_of_event(id, u.limits()), germ_of_event(invar_permutation(), u.even()),
                          Germ::constant(make_rational(2, 7)), Germ::constant(make_rational(-3))};
  Germ zero = Germ::constant(0), one = Germ::constant(1);
  for (int trial = 0; trial < 300; ++trial) {
    const Germ& f = atoms[rng() % atoms.size()];
    const Germ& g = atoms[rng() % atoms.size()];
    const Germ& h = atoms[rng() % atoms.size()];
    Snapshot t = random_snapshot(u, rng);
    Rational ft = f.eval(t), gt = g.eval(t), ht = h.eval(t);
    CHECK((f + g).eval(t) == ft + gt);
    CHECK((f - g).eval(t) == ft - gt);
    CHECK((f * g).eval(t) == ft * gt);
    CHECK((f + zero).eval(t) == ft);
    CHECK((f * one).eval(t) == ft);
    CHECK((f * (g + h)).eval(t) == (f * g + f * h).eval(t));
    CHECK(((f + g) + h).eval(t) == (f + (g + h)).eval(t));
    if (gt != 0) {
      CHECK((f / g).eval(t) == ft / gt);
      CHECK((g / g).eval(t) == 1);
    } else {
      CHECK_FALSE((f / g).try_eval(t));
    }
  }
  // finite additivity: Even + Odd is the germ of Even u Odd = On
  for (int trial = 0; trial < 100; ++trial) {
    Snapshot t = random_snapshot(u, rng);
    CHECK((germ_of_event(id, u.even()) + germ_of_event(id, u.odd())).eval(t) ==
          germ_of_event(id, u.ordinals()).eval(t));
  }
}

TEST_CASE("structural keys") {
  auto u = Universe::make(Mode::Ordinal, 3);
  auto a = germ_of_event(id, u.even()) + Germ::constant(1);
  auto b = germ_of_event(id, u.even()) + Germ::constant(1);
  CHECK(structurally_equal(a, b));
  CHECK_FALSE(structurally_equal(a, germ_of_event(id, u.odd()) + Germ::constant(1)));
  CHECK(germ_arith(ArithOp::Mul, a, b).key() == (a * b).key());
}

#include <doctest.h>

#include <bit>
#include <random>

#include "nap/bootstrap.hpp"
#include "nap/error.hpp"

using namespace nap;

namespace {
const TierConfig desk{{5, 9, 13, 17}};
const auto hf = Universe::make(Mode::Hf, 5);

std::vector<SetValue> top_of(std::size_t k) {
  std::vector<SetValue> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(hf_from_index(i));
  return out;
}

Rational value_of(const TieredValue& tv) {
  REQUIRE(std::holds_alternative<Rational>(tv));
  return std::get<Rational>(tv);
}

// sub-masks of `m`, including 0 and m
std::vector<Mask> submasks(Mask m) {
  std::vector<Mask> out;
  for (Mask s = m;; s = (s - 1) & m) {
    out.push_back(s);
    if (s == 0) break;
  }
  return out;
}
} // namespace

TEST_CASE("tier thresholds") {
  CHECK(desk.tier(0) == 0);
  CHECK(desk.tier(4) == 0);
  CHECK(desk.tier(5) == 1);
  CHECK(desk.tier(12) == 2);
  CHECK(desk.alpha(6) == 5);
  CHECK(desk.alpha(13) == 13);
  CHECK_THROWS_AS(desk.alpha(3), Error);
  CHECK_THROWS_AS((TierConfig{{5, 5}}.validate()), Error);
  CHECK_THROWS_AS((TierConfig{{1, 5}}.validate()), Error);
  CHECK_NOTHROW(desk.validate());
}

TEST_CASE("bit extraction") {
  CHECK(extract_bits(0b1011, 0b0011) == 0b11);
  CHECK(extract_bits(0b1011, 0b1100) == 0b10);
  CHECK(extract_bits(0b1111, 0) == 0);
  std::mt19937 rng(1);
  for (int i = 0; i < 200; ++i) {
    Mask m = rng() & 0xFFFF, s = rng() & 0xFFFF;
    Mask expect = 0;
    for (unsigned bit = 0, j = 0; bit < 16; ++bit)
      if ((s >> bit) & 1) expect |= ((m >> bit) & 1) << j++;
    CHECK(extract_bits(m, s) == expect);
  }
}

TEST_CASE("constraint-set restriction formula") {
  // window {a,b,c} as bits 0,1,2
  Family x(3);
  x.set(0b011);  // {a,b}
  x.set(0b101);  // {a,c}
  auto r = restrict_constraint_set(x, 0b011, 2);
  CHECK(r.width() == 2);
  CHECK(r.members() == std::vector<Mask>{0b01});

  Family all(4);
  for (Mask m = 0; m < 16; ++m) all.set(m);
  for (Mask sub : {Mask{0b0110}, Mask{0b1011}, Mask{0b1111}})
    for (std::size_t alpha : {1, 2, 3}) {
      auto rr = restrict_constraint_set(all, sub, alpha);
      const auto w = static_cast<unsigned>(std::popcount(sub));
      for (Mask y = 0; y < (Mask{1} << w); ++y)
        CHECK(rr.test(y) == (static_cast<std::size_t>(std::popcount(y)) < alpha));
    }
}

TEST_CASE("restriction of a six-element window to three elements") {
  // A three-element window needs a tier with t <= 3, so sub-snapshots have
  // at most two elements: pairwise intersections meet, triples of points do not.
  const TierConfig low{{3, 7, 13}};
  auto top = top_of(6);
  TieredProb tp(top, low, bootstrap_base(top, {0b000111}, low));
  auto rb = tp.restrict(tp.top_base(), 0b000111);
  CHECK(rb.alpha == 3);
  auto audit = tp.audit(rb);
  CHECK(audit.fine);
  CHECK(audit.non_principal);
  CHECK(audit.no_empty);
  CHECK(family_fip(rb, 2));
  CHECK_FALSE(family_fip(rb, 3));

  // Fineness(x) restricts to Fineness(x) on the window
  const Mask x = tp.mask_of({top[1]});
  const Mask bit = extract_bits(x, 0b000111);
  const auto* f = rb.find(Constraint::fineness(top[1]).key());
  REQUIRE(f);
  for (Mask y = 0; y < 8; ++y) CHECK(f->family.test(y) == ((y & bit) != 0 && std::popcount(y) < 3));

  TieredProb bare(top, low, bootstrap_base(top, {}, low));
  try {
    bare.restrict(bare.top_base(), 0b000111);
    FAIL("restriction without a window bound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingSubsetBound);
  }
}

TEST_CASE("a twelve-element window restricted to six elements passes all five checks") {
  auto top = top_of(12);
  TieredProb tp(top, desk, bootstrap_base(top, {0x03F}, desk));
  auto rb = tp.restrict(tp.top_base(), 0x03F);
  CHECK(rb.alpha == 5);
  auto audit = tp.audit(rb);
  CHECK(audit.all());
}

TEST_CASE("restricting twice equals restricting once") {
  auto top = top_of(12);
  const Mask s = 0x3FF, t = 0x01F;  // tiers 2 and 1
  TieredProb tp(top, desk, bootstrap_base(top, {s, t}, desk));
  auto once = tp.restrict(tp.top_base(), t);
  auto twice = tp.restrict(tp.restrict(tp.top_base(), s), t);
  REQUIRE(once.members.size() == twice.members.size());
  for (std::size_t i = 0; i < once.members.size(); ++i) {
    CHECK(once.members[i].label == twice.members[i].label);
    CHECK(once.members[i].family == twice.members[i].family);
  }
  CHECK(family_fip(once));
}

TEST_CASE("within one tier the two-step restriction only shrinks members") {
  auto top = top_of(12);
  const Mask s = 0x0FF, t = 0x01F;  // both tier 1
  TieredProb tp(top, desk, bootstrap_base(top, {s, t}, desk));
  auto once = tp.restrict(tp.top_base(), t);
  auto twice = tp.restrict(tp.restrict(tp.top_base(), s), t);
  for (std::size_t i = 0; i < once.members.size(); ++i)
    CHECK((once.members[i].family & twice.members[i].family) == twice.members[i].family);
}

TEST_CASE("tiered probabilities on a tier-1 window") {
  auto top = top_of(7);
  TieredProb tp(top, desk, bootstrap_base(top, {}, desk));
  const auto id = RandomVariable::identity();
  const Mask s = tp.full();
  auto total = tp.tiered_prob(hf.explicit_class(top), id, s);
  auto single = tp.tiered_prob(hf.explicit_class({top[2]}), id, s);
  const Mask x = tp.mask_of({top[2]});
  for (Mask y = 1; y < (Mask{1} << 7); ++y) {
    if (std::popcount(y) >= 5) continue;
    CHECK(value_of(total.eval(y)) == 1);
    CHECK(value_of(single.eval(y)) == ((y & x) ? count_ratio(1, std::popcount(y)) : Rational(0)));
  }
  CHECK_THROWS_AS(total.eval(0), Error);
}

TEST_CASE("tier-0 leaves of an ordinal window count directly") {
  auto ord = Universe::make(Mode::Ordinal, 3);
  std::vector<SetValue> top{SetValue::natural(0), SetValue::natural(1), SetValue::natural(2), SetValue::natural(3),
                            parse_value("w"), parse_value("w+1"), parse_value("u0")};
  TieredProb tp(top, desk, bootstrap_base(top, {}, desk), Mode::Ordinal);
  auto g = tp.tiered_prob(ord.even(), RandomVariable::identity(), tp.full());
  for (Mask y = 1; y < (Mask{1} << 7); ++y) {
    if (std::popcount(y) >= 5) continue;
    Snapshot t = tp.snapshot_of(y);
    CHECK(value_of(g.eval(y)) == count_ratio(t.count_in(ord.even()), t.size()));
  }
}

TEST_CASE("coherence of nested windows") {
  auto top = top_of(12);
  const Mask t = 0x0FF;
  TieredProb tp(top, desk, bootstrap_base(top, {t, 0x01F, 0x0F8}, desk));
  std::vector<SetValue> tv, outside;
  for (unsigned i = 0; i < 12; ++i) ((t >> i) & 1 ? tv : outside).push_back(top[i]);
  CHECK(tp.coherence_check(hf.explicit_class(tv), t, tp.full()).passed());
  CHECK(tp.coherence_check(hf.explicit_class(outside), t, tp.full()).passed());
  std::mt19937 rng(4);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<SetValue> a;
    for (const auto& x : top)
      if (rng() & 1) a.push_back(x);
    CHECK(tp.coherence_check(hf.explicit_class(a), t, tp.full(), 6, trial).passed());
  }
}

TEST_CASE("the non-restriction counterexample") {
  auto r = non_restriction_counterexample(desk);
  CHECK(r.top_fip);
  CHECK(r.restriction_has_empty);
  CHECK(r.repaired);
  CHECK(r.small_choice_restricts);
  CHECK(r.big_choice_fails);
  CHECK(r.demonstrated());
  auto small = non_restriction_counterexample(TierConfig{{4, 8, 12}});
  CHECK(small.demonstrated());
}

#include <doctest.h>

#include <algorithm>

#include "nap/error.hpp"
#include "nap/filter_base.hpp"
#include "nap/verdict.hpp"
#include "nap/witness.hpp"

using namespace nap;

namespace {
SetValue n(std::uint64_t k) { return SetValue::natural(k); }
SetValue v(const char* code) { return parse_value(code); }
const auto id = RandomVariable::identity();
const auto ord = Universe::make(Mode::Ordinal, 3);

bool member(const Constraint& c, const Snapshot& t) { return constraint_membership(c, t, Mode::Ordinal); }

void check_sound(const Universe& u, const Verdict& vd) {
  auto a = audit_verdict(u, vd, 30, 99);
  CHECK_MESSAGE(a.refutations == 0, vd.claim);
  CHECK(a.ok(30));
}
} // namespace

TEST_CASE("constraint membership") {
  CHECK(member(Constraint::fineness(n(5)), {n(1), n(5), n(9)}));
  CHECK_FALSE(member(Constraint::fineness(n(4)), {n(1), n(5), n(9)}));
  CHECK(member(Constraint::interval(2), {n(0), n(1), n(2), v("w"), v("w+1"), v("w+2")}));
  CHECK_FALSE(member(Constraint::interval(2), {n(0), v("w")}));
  CHECK(member(Constraint::weight(2), {n(0), n(1), v("u0"), v("u1")}));
  CHECK_FALSE(member(Constraint::weight(3), {n(0), n(1), v("u0"), v("u1")}));
  CHECK(member(Constraint::ratio(ord.limits(), ord.odd(), 2), {v("w"), n(1), n(3)}));
  CHECK_FALSE(member(Constraint::ratio(ord.limits(), ord.odd(), 3), {v("w"), n(1), n(3)}));
  CHECK_FALSE(member(Constraint::ratio(ord.limits(), ord.odd(), 1), {v("w")}));  // B must meet T
  CHECK(member(Constraint::order_lt(ord.limits(), ord.odd()), {v("w"), n(1), n(3)}));
  CHECK(member(Constraint::order_ge(ord.odd(), ord.limits()), {v("w"), n(1)}));
  CHECK(member(Constraint::subset_bound({n(0), n(1), n(2)}, 2), {n(0), n(5)}));
  CHECK_FALSE(member(Constraint::subset_bound({n(0), n(1), n(2)}, 2), {n(0), n(1)}));
  CHECK(member(Constraint::min_size(2), {n(0), n(5)}));
  CHECK_FALSE(member(Constraint::max_size(2), {n(0), n(5)}));
  try {
    member(Constraint::all_fineness(), {n(0)});
    FAIL("parametric families are not snapshot sets");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
  }
}

TEST_CASE("constraint keys parse back") {
  auto resolve = [](const std::string& name) -> ClassSpec {
    if (name == "Lim") return ord.limits();
    if (name == "Odd") return ord.odd();
    throw Error(ErrorCode::ParseError, name);
  };
  for (const auto& c : {Constraint::fineness(v("w+1")), Constraint::ratio(ord.limits(), ord.odd(), 4),
                        Constraint::order_lt(ord.limits(), ord.odd()), Constraint::interval(3),
                        Constraint::weight(2), Constraint::min_size(5), Constraint::max_size(9),
                        Constraint::subset_bound({n(0), n(1)}, 2), Constraint::all_fineness(),
                        Constraint::all_interval(), Constraint::all_ratio(ord.limits(), ord.odd())})
    CHECK(parse_constraint(c.key(), resolve).key() == c.key());
}

TEST_CASE("solver and FIP") {
  Budget b;
  auto abc = std::vector<Constraint>{Constraint::fineness(n(0)), Constraint::fineness(v("w")),
                                     Constraint::fineness(v("u1"))};
  auto r = solve_constraints(ord, abc, b);
  REQUIRE(r.status == SolveResult::Status::Found);
  CHECK(satisfies_all(*r.witness, abc, Mode::Ordinal));

  auto contra = std::vector<Constraint>{Constraint::order_lt(ord.even(), ord.odd()),
                                        Constraint::order_ge(ord.even(), ord.odd())};
  CHECK(solve_constraints(ord, contra, b).status == SolveResult::Status::Refuted);
  CHECK(check_fip(ord, FilterBase(contra)).status == FipResult::Status::Refuted);

  auto fine = check_fip(ord, FilterBase(abc));
  CHECK(fine.status == FipResult::Status::Witnessed);
  for (const auto& [keys, t] : fine.witnesses)
    for (const auto& c : abc)
      if (std::find(keys.begin(), keys.end(), c.key()) != keys.end()) CHECK(member(c, t));

  FilterBase f0({Constraint::all_fineness(), Constraint::all_ratio(ord.limits(), ord.successors()),
                 Constraint::all_interval(), Constraint::all_weight()});
  CHECK(check_fip(ord, f0).status == FipResult::Status::Witnessed);

  // Weight padding combined with an order judgement
  auto mixed = std::vector<Constraint>{Constraint::weight(3), Constraint::order_lt(ord.limits(), ord.ordinals()),
                                       Constraint::fineness(n(4))};
  auto m = solve_constraints(ord, mixed, b);
  REQUIRE(m.status == SolveResult::Status::Found);
  CHECK(satisfies_all(*m.witness, mixed, Mode::Ordinal));
}

TEST_CASE("superregular witnesses") {
  auto f = superreg_witness(ord, {n(0)}, {{ord.even(), ord.ordinals(), 2}});
  CHECK(f.size() == 3);
  CHECK(f.contains(n(0)));
  CHECK(f.count_in(ord.odd()) == 2);
  CHECK(member(Constraint::ratio(ord.even(), ord.ordinals(), 2), f));

  auto g = superreg_witness(ord, {v("u3")}, {{ord.limits(), ord.odd(), 4}});
  CHECK(g.count_in(ord.limits()) == 0);
  CHECK(member(Constraint::ratio(ord.limits(), ord.odd(), 4), g));

  auto a1 = ord.explicit_class({n(0), n(1)}, "A1");
  auto a2 = ord.below(v("w"));
  auto h = superreg_witness(ord, {n(0), n(7), v("w")}, {{a1, a2, 3}, {a2, ord.ordinals(), 3}});
  CHECK(member(Constraint::ratio(a1, a2, 3), h));
  CHECK(member(Constraint::ratio(a2, ord.ordinals(), 3), h));
}

TEST_CASE("ordinal witnesses") {
  for (std::uint64_t k = 1; k <= 3; ++k)
    for (std::uint64_t l = 1; l <= 3; ++l)
      for (std::uint64_t m = 1; m <= 3; ++m) {
        auto f = ordinal_witness(ord, {n(5)}, k, l, m, {{ord.limits(), ord.odd(), k}});
        CHECK(member(Constraint::fineness(n(5)), f));
        CHECK(member(Constraint::ratio(ord.limits(), ord.odd(), k), f));
        CHECK(member(Constraint::interval(l), f));
        CHECK(member(Constraint::weight(m), f));
        CHECK(Rational(f.count_in(ord.ordinals()), f.size()) <= Rational(1, m));
      }
  auto e = ordinal_witness(ord, {}, 1, 1, 1, {});
  CHECK(member(Constraint::interval(1), e));
  CHECK(member(Constraint::weight(1), e));
  auto hf = Universe::make(Mode::Hf, 4);
  CHECK_THROWS_AS(ordinal_witness(hf, {}, 1, 1, 1, {}), Error);
}

TEST_CASE("power-class witness extension") {
  auto hf = Universe::make(Mode::Hf, 5);
  auto a1 = hf.members_of(hf_from_index(3));
  auto a2 = hf.members_of(hf_from_index(7));
  auto p1 = hf.power_class(a1), p2 = hf.power_class(a2);
  std::vector<SetValue> both;
  for (std::uint64_t i = 0; i < 16 && both.size() < 2; ++i)
    if (auto x = hf.element_at(i); x && p1.contains(*x)) both.push_back(*x);
  Snapshot fm(both);
  REQUIRE(fm.count_in(p1) == 2);

  CHECK(powerset_witness_extend(hf, fm, {}, {}) == fm);

  auto lt = Constraint::order_lt(p1, p2);
  auto f = powerset_witness_extend(hf, fm, {lt}, {});
  CHECK(member(lt, f) == true);
  CHECK(f.count_in(p2) > f.count_in(p1));
  for (const auto& x : fm.states()) CHECK(f.contains(x));

  auto ge = Constraint::order_ge(p2, p1);
  auto tie = powerset_witness_extend(hf, fm, {Constraint::order_ge(p1, p2), ge}, {});
  CHECK(tie.count_in(p1) == tie.count_in(p2));
}

TEST_CASE("power-set prefilter stages") {
  auto hf = Universe::make(Mode::Hf, 5);
  FilterBase prior({Constraint::fineness(hf_from_index(1))});
  auto same = powerset_prefilter_stage(hf, 4, prior, {});
  CHECK(same.base.serialize() == prior.serialize());
  CHECK(same.choices.empty());

  auto pairs = level_pairs(hf, 3, 3, 5);
  REQUIRE(pairs.size() == 3);
  auto st = powerset_prefilter_stage(hf, 3, prior, pairs);
  CHECK(st.choices.size() == 3);
  CHECK(check_fip(hf, st.base).status == FipResult::Status::Witnessed);

  auto x = hf_from_index(9);
  auto refl = powerset_prefilter_stage(hf, 3, FilterBase{}, {{x, x}});
  CHECK(refl.choices == std::vector<std::string>{"Ge"});
  CHECK(check_fip(hf, refl.base).status == FipResult::Status::Witnessed);
}

TEST_CASE("verdict rules") {
  auto fine = fineness_base();
  auto pe = germ_of_event(id, ord.even()), po = germ_of_event(id, ord.ordinals());

  auto r1 = compare(ord, pe, Relation::Lt, po, fine);
  CHECK(r1.kind == Verdict::Kind::Forced);
  CHECK(r1.rule == "R1");
  check_sound(ord, r1);
  CHECK(compare(ord, po, Relation::Lt, pe, fine).kind == Verdict::Kind::ForcedNot);
  CHECK(compare(ord, pe, Relation::Lt, po, FilterBase{}).kind != Verdict::Kind::Forced);

  auto eq = compare(ord, pe, Relation::Eq, germ_of_event(id, ord.even()), FilterBase{});
  CHECK(eq.kind == Verdict::Kind::Forced);
  CHECK(eq.rule == "structural");

  auto pl = germ_of_event(id, ord.limits()), pd = germ_of_event(id, ord.odd());
  FilterBase ratio({Constraint::ratio(ord.limits(), ord.odd(), 3)});
  auto r2 = compare(ord, pl / pd, Relation::Le, Germ::constant(Rational(1, 3)), ratio);
  CHECK(r2.kind == Verdict::Kind::Forced);
  CHECK(r2.rule == "R2");
  check_sound(ord, r2);

  FilterBase order({Constraint::order_lt(ord.limits(), ord.odd())});
  auto r3 = compare(ord, pl, Relation::Lt, pd, order);
  CHECK(r3.rule == "R3");
  CHECK(r3.kind == Verdict::Kind::Forced);
  check_sound(ord, r3);

  FilterBase weight({Constraint::weight(4)});
  auto r4 = compare(ord, po, Relation::Le, Germ::constant(Rational(1, 4)), weight);
  CHECK(r4.rule == "R4");
  CHECK(r4.kind == Verdict::Kind::Forced);
  check_sound(ord, r4);

  FilterBase interval({Constraint::interval(3), Constraint::fineness(n(0))});
  auto gap = conditional_germ(id, ord.even(), id, ord.ordinals()) - conditional_germ(id, ord.odd(), id, ord.ordinals());
  auto r5 = compare(ord, gap, Relation::Le, Germ::constant(Rational(1, 4)), interval);
  CHECK(r5.rule == "R5");
  CHECK(r5.kind == Verdict::Kind::Forced);
  check_sound(ord, r5);
}

TEST_CASE("infinitesimal classification") {
  auto fine = fineness_base();
  CHECK(classify_infinitesimal(ord, germ_of_event(id, ord.explicit_class({v("w")})), fine).kind ==
        Infinitesimal::ApproxZero);
  CHECK(classify_infinitesimal(ord, germ_of_event(invar_permutation(), ord.explicit_class({n(3)})), fine).kind ==
        Infinitesimal::ApproxZero);
  CHECK(classify_infinitesimal(ord, Germ::constant(Rational(1, 2)), fine).kind == Infinitesimal::NotApproxZero);
  CHECK(classify_infinitesimal(ord, germ_of_event(id, ord.ordinals()), FilterBase({Constraint::all_weight()})).kind ==
        Infinitesimal::ApproxZero);
  CHECK(classify_infinitesimal(ord, germ_of_event(id, ord.ordinals()), fine).kind == Infinitesimal::Undetermined);
}

TEST_CASE("much-less-than") {
  auto pl = germ_of_event(id, ord.limits()), ps = germ_of_event(id, ord.successors());
  auto forced = much_less(ord, pl, ps, FilterBase({Constraint::all_ratio(ord.limits(), ord.successors())}));
  CHECK(forced.kind == Verdict::Kind::Forced);
  check_sound(ord, forced);
  CHECK(much_less(ord, pl, pl, FilterBase{}).kind == Verdict::Kind::ForcedNot);
  auto finite = much_less(ord, pl, ps, FilterBase({Constraint::ratio(ord.limits(), ord.successors(), 2),
                                                    Constraint::ratio(ord.limits(), ord.successors(), 3)}));
  CHECK(finite.kind == Verdict::Kind::Undetermined);
}

#include "nap/constraint.hpp"

#include <algorithm>

#include "nap/error.hpp"

namespace nap {

Constraint Constraint::make(State s) { return Constraint(std::make_shared<const State>(std::move(s))); }

Constraint Constraint::fineness(SetValue x) {
  State s{Kind::Fineness, Kind::Fineness, "Fineness(" + x.code() + ")", x, {}, {}, 0, {}};
  return make(std::move(s));
}

Constraint Constraint::ratio(ClassSpec a, ClassSpec b, std::uint64_t k) {
  if (k == 0) throw Error(ErrorCode::ValidationError, "ratio parameter must be positive");
  std::string key = "Ratio(" + a.name() + "," + b.name() + "," + std::to_string(k) + ")";
  return make(State{Kind::Ratio, Kind::Ratio, key, {}, std::move(a), std::move(b), k, {}});
}

Constraint Constraint::order_lt(ClassSpec a, ClassSpec b) {
  std::string key = "OrderLt(" + a.name() + "," + b.name() + ")";
  return make(State{Kind::OrderLt, Kind::OrderLt, key, {}, std::move(a), std::move(b), 0, {}});
}

Constraint Constraint::order_ge(ClassSpec a, ClassSpec b) {
  std::string key = "OrderGe(" + a.name() + "," + b.name() + ")";
  return make(State{Kind::OrderGe, Kind::OrderGe, key, {}, std::move(a), std::move(b), 0, {}});
}

Constraint Constraint::interval(std::uint64_t l) {
  if (l == 0) throw Error(ErrorCode::ValidationError, "interval parameter must be positive");
  return make(State{Kind::Interval, Kind::Interval, "Interval(" + std::to_string(l) + ")", {}, {}, {}, l, {}});
}

Constraint Constraint::weight(std::uint64_t m) {
  if (m == 0) throw Error(ErrorCode::ValidationError, "weight parameter must be positive");
  return make(State{Kind::Weight, Kind::Weight, "Weight(" + std::to_string(m) + ")", {}, {}, {}, m, {}});
}

Constraint Constraint::subset_bound(Snapshot window, std::uint64_t alpha) {
  std::string key = "SubsetBound(" + window.code() + "," + std::to_string(alpha) + ")";
  return make(State{Kind::SubsetBound, Kind::SubsetBound, key, {}, {}, {}, alpha, std::move(window)});
}

Constraint Constraint::min_size(std::uint64_t t) {
  return make(State{Kind::MinSize, Kind::MinSize, "MinSize(" + std::to_string(t) + ")", {}, {}, {}, t, {}});
}

Constraint Constraint::max_size(std::uint64_t t) {
  return make(State{Kind::MaxSize, Kind::MaxSize, "MaxSize(" + std::to_string(t) + ")", {}, {}, {}, t, {}});
}

Constraint Constraint::all_fineness() {
  return make(State{Kind::Parametric, Kind::Fineness, "Fineness(*)", {}, {}, {}, 0, {}});
}

Constraint Constraint::all_ratio(ClassSpec a, ClassSpec b) {
  std::string key = "Ratio(" + a.name() + "," + b.name() + ",*)";
  return make(State{Kind::Parametric, Kind::Ratio, key, {}, std::move(a), std::move(b), 0, {}});
}

Constraint Constraint::all_interval() {
  return make(State{Kind::Parametric, Kind::Interval, "Interval(*)", {}, {}, {}, 0, {}});
}

Constraint Constraint::all_weight() {
  return make(State{Kind::Parametric, Kind::Weight, "Weight(*)", {}, {}, {}, 0, {}});
}

Constraint Constraint::instantiate(std::uint64_t n) const {
  if (!is_parametric()) return *this;
  switch (family()) {
  case Kind::Ratio: return ratio(a(), b(), n);
  case Kind::Interval: return interval(n);
  case Kind::Weight: return weight(n);
  default:
    throw Error(ErrorCode::ValidationError, key() + " is instantiated by a point, not a number");
  }
}

Constraint Constraint::instantiate_point(const SetValue& x) const {
  if (!is_parametric() || family() != Kind::Fineness)
    throw Error(ErrorCode::ValidationError, key() + " is not the fineness family");
  return fineness(x);
}

namespace {

bool interval_member(const Snapshot& t, std::uint64_t l) {
  // Ordinals sort first and in increasing order.
  const auto states = t.states();
  std::size_t i = 0;
  while (i < states.size() && states[i].is_ordinal()) {
    std::size_t j = i + 1;
    while (j < states.size() && states[j].is_ordinal() &&
           states[j].omega_coeff() == states[j - 1].omega_coeff() &&
           states[j].finite_part() == states[j - 1].finite_part() + 1)
      ++j;
    if (j - i < l + 1) return false;
    i = j;
  }
  return true;
}

std::size_t count_ordinals(const Snapshot& t) {
  return static_cast<std::size_t>(std::count_if(t.states().begin(), t.states().end(),
                                                [](const SetValue& x) { return x.is_ordinal(); }));
}

} // namespace

bool constraint_membership(const Constraint& c, const Snapshot& t, Mode mode) {
  using K = Constraint::Kind;
  switch (c.kind()) {
  case K::Fineness:
    return t.contains(c.point());
  case K::Ratio: {
    std::size_t nb = t.count_in(c.b());
    return nb > 0 && c.param() * t.count_in(c.a()) <= nb;
  }
  case K::OrderLt:
    return t.count_in(c.a()) < t.count_in(c.b());
  case K::OrderGe:
    return t.count_in(c.a()) >= t.count_in(c.b());
  case K::Interval:
    if (mode != Mode::Ordinal) throw Error(ErrorCode::WrongMode, "Interval constraint needs ordinals");
    return interval_member(t, c.param());
  case K::Weight:
    if (mode != Mode::Ordinal) throw Error(ErrorCode::WrongMode, "Weight constraint needs ordinals");
    return !t.empty() && c.param() * count_ordinals(t) <= t.size();
  case K::SubsetBound:
    return t.intersect(c.window()).size() < c.param();
  case K::MinSize:
    return t.size() >= c.param();
  case K::MaxSize:
    return t.size() < c.param();
  case K::Parametric:
    throw Error(ErrorCode::ValidationError, c.key() + " is a family, not a set of snapshots");
  }
  return false;
}

FilterBase::FilterBase(std::vector<Constraint> constraints, std::string provenance)
    : provenance_(std::move(provenance)) {
  for (auto& c : constraints)
    if (!contains(c)) constraints_.push_back(std::move(c));
}

bool FilterBase::contains(const Constraint& c) const { return find(c.key()) != nullptr; }

const Constraint* FilterBase::find(const std::string& key) const {
  for (const auto& c : constraints_)
    if (c.key() == key) return &c;
  return nullptr;
}

FilterBase FilterBase::with(const Constraint& c) const {
  FilterBase out = *this;
  if (!out.contains(c)) out.constraints_.push_back(c);
  return out;
}

FilterBase FilterBase::with(const std::vector<Constraint>& cs) const {
  FilterBase out = *this;
  for (const auto& c : cs)
    if (!out.contains(c)) out.constraints_.push_back(c);
  return out;
}

FilterBase FilterBase::with_note(std::string note) const {
  FilterBase out = *this;
  out.notes_.push_back(std::move(note));
  return out;
}

FilterBase FilterBase::with_provenance(std::string provenance) const {
  FilterBase out = *this;
  out.provenance_ = std::move(provenance);
  return out;
}

std::string FilterBase::serialize() const {
  std::string s = "# provenance " + provenance_ + "\n";
  for (const auto& n : notes_) s += "# note " + n + "\n";
  for (const auto& c : constraints_) s += c.key() + "\n";
  return s;
}

namespace {

// Splits "a,b,c" at commas outside brackets.
std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(' || ch == '[' || ch == '{') ++depth;
    if (ch == ')' || ch == ']' || ch == '}') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::uint64_t to_u64(const std::string& s) {
  try {
    std::size_t used = 0;
    auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "expected a natural number, got '" + s + "'");
  }
}

} // namespace

Constraint parse_constraint(const std::string& text,
                            const std::function<ClassSpec(const std::string&)>& resolve) {
  auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')')
    throw Error(ErrorCode::ParseError, "bad constraint '" + text + "'");
  const std::string head = text.substr(0, open);
  const auto args = split_args(text.substr(open + 1, text.size() - open - 2));
  auto want = [&](std::size_t n) {
    if (args.size() != n)
      throw Error(ErrorCode::ParseError, head + " takes " + std::to_string(n) + " arguments");
  };
  if (head == "Fineness") {
    want(1);
    return args[0] == "*" ? Constraint::all_fineness() : Constraint::fineness(parse_value(args[0]));
  }
  if (head == "Ratio") {
    want(3);
    if (args[2] == "*") return Constraint::all_ratio(resolve(args[0]), resolve(args[1]));
    return Constraint::ratio(resolve(args[0]), resolve(args[1]), to_u64(args[2]));
  }
  if (head == "OrderLt") {
    want(2);
    return Constraint::order_lt(resolve(args[0]), resolve(args[1]));
  }
  if (head == "OrderGe") {
    want(2);
    return Constraint::order_ge(resolve(args[0]), resolve(args[1]));
  }
  if (head == "Interval") {
    want(1);
    return args[0] == "*" ? Constraint::all_interval() : Constraint::interval(to_u64(args[0]));
  }
  if (head == "Weight") {
    want(1);
    return args[0] == "*" ? Constraint::all_weight() : Constraint::weight(to_u64(args[0]));
  }
  if (head == "SubsetBound") {
    want(2);
    return Constraint::subset_bound(parse_snapshot(args[0]), to_u64(args[1]));
  }
  if (head == "MinSize") {
    want(1);
    return Constraint::min_size(to_u64(args[0]));
  }
  if (head == "MaxSize") {
    want(1);
    return Constraint::max_size(to_u64(args[0]));
  }
  throw Error(ErrorCode::ParseError, "unknown constraint '" + head + "'");
}

} // namespace nap

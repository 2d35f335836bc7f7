#include "nap/germ.hpp"

#include "nap/error.hpp"

namespace nap {

namespace {
const char* op_symbol(Germ::Op op) {
  switch (op) {
  case Germ::Op::Add: return "+";
  case Germ::Op::Sub: return "-";
  case Germ::Op::Mul: return "*";
  case Germ::Op::Div: return "/";
  default: return "?";
  }
}
} // namespace

Germ Germ::constant(Rational q) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->q = q;
  n->key = "Const(" + to_string(q) + ")";
  return Germ(std::move(n));
}

Germ Germ::event(RandomVariable theta, ClassSpec a) {
  auto n = std::make_shared<Node>();
  n->op = Op::Event;
  n->key = "Pr(" + theta.name() + " in " + a.name() + ")";
  n->theta = std::move(theta);
  n->a = std::move(a);
  return Germ(std::move(n));
}

Germ Germ::joint(RandomVariable theta, ClassSpec a, RandomVariable nu, ClassSpec b) {
  auto n = std::make_shared<Node>();
  n->op = Op::Joint;
  n->key = "Pr(" + theta.name() + " in " + a.name() + " & " + nu.name() + " in " + b.name() + ")";
  n->theta = std::move(theta);
  n->a = std::move(a);
  n->nu = std::move(nu);
  n->b = std::move(b);
  return Germ(std::move(n));
}

Germ Germ::star_sum(RationalFamily family, ClassSpec index_set) {
  auto n = std::make_shared<Node>();
  n->op = Op::StarSum;
  n->key = "Sum*(" + family.name + " over " + index_set.name() + ")";
  n->family = std::move(family);
  n->a = std::move(index_set);
  return Germ(std::move(n));
}

Germ Germ::star_sum(std::vector<std::pair<SetValue, Germ>> terms) {
  auto n = std::make_shared<Node>();
  n->op = Op::StarSum;
  n->key = "Sum*[";
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) n->key += ",";
    n->key += terms[i].first.code() + ":" + terms[i].second.key();
    n->indices.push_back(terms[i].first);
    n->children.push_back(terms[i].second);
  }
  n->key += "]";
  return Germ(std::move(n));
}

Germ Germ::binary(Op op, const Germ& x, const Germ& y) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->key = "(" + x.key() + " " + op_symbol(op) + " " + y.key() + ")";
  n->children = {x, y};
  return Germ(std::move(n));
}

Germ operator+(const Germ& x, const Germ& y) { return Germ::binary(Germ::Op::Add, x, y); }
Germ operator-(const Germ& x, const Germ& y) { return Germ::binary(Germ::Op::Sub, x, y); }
Germ operator*(const Germ& x, const Germ& y) { return Germ::binary(Germ::Op::Mul, x, y); }
Germ operator/(const Germ& x, const Germ& y) { return Germ::binary(Germ::Op::Div, x, y); }

Rational Germ::eval(const Snapshot& t) const {
  const Node& n = *node_;
  switch (n.op) {
  case Op::Const:
    return n.q;
  case Op::Event:
    return snapshot_prob(*n.theta, *n.a, t);
  case Op::Joint:
    return joint_snapshot_prob(*n.theta, *n.a, *n.nu, *n.b, t);
  case Op::StarSum: {
    Rational sum = 0;
    if (n.family) {
      for (const auto& i : t.states())
        if (n.a->contains(i)) sum += n.family->term(i);
    } else {
      for (std::size_t k = 0; k < n.indices.size(); ++k)
        if (t.contains(n.indices[k])) sum += n.children[k].eval(t);
    }
    return sum;
  }
  case Op::Add:
    return n.children[0].eval(t) + n.children[1].eval(t);
  case Op::Sub:
    return n.children[0].eval(t) - n.children[1].eval(t);
  case Op::Mul:
    return n.children[0].eval(t) * n.children[1].eval(t);
  case Op::Div: {
    Rational den = n.children[1].eval(t);
    if (den == 0)
      throw Error(ErrorCode::DivisionUndefined, n.children[1].key() + " vanishes on " + t.code());
    return n.children[0].eval(t) / den;
  }
  }
  throw Error(ErrorCode::ValidationError, "corrupt germ");
}

std::optional<Rational> Germ::try_eval(const Snapshot& t) const {
  try {
    return eval(t);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DivisionUndefined || e.code() == ErrorCode::EmptySnapshot)
      return std::nullopt;
    throw;
  }
}

Germ germ_of_event(const RandomVariable& theta, const ClassSpec& a) { return Germ::event(theta, a); }

Germ germ_arith(ArithOp op, const Germ& g1, const Germ& g2) {
  switch (op) {
  case ArithOp::Add: return g1 + g2;
  case ArithOp::Sub: return g1 - g2;
  case ArithOp::Mul: return g1 * g2;
  case ArithOp::Div: return g1 / g2;
  }
  throw Error(ErrorCode::ValidationError, "unknown arithmetic op");
}

Germ conditional_germ(const RandomVariable& theta, const ClassSpec& a, const RandomVariable& nu,
                      const ClassSpec& b) {
  return Germ::joint(theta, a, nu, b) / Germ::event(nu, b);
}

Germ star_sum(Germ::RationalFamily family, const ClassSpec& index_set) {
  return Germ::star_sum(std::move(family), index_set);
}

} // namespace nap

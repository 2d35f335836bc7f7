#ifndef NAP_GERM_HPP
#define NAP_GERM_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nap/random_variable.hpp"
#include "nap/rational.hpp"
#include "nap/snapshot.hpp"
#include "nap/universe.hpp"

namespace nap {

/// A rational-valued function on snapshots, kept as an expression tree. Two
/// germs that agree on a filter-large set of snapshots denote the same
/// hyperrational; structural equality is the only equality decided here.
class Germ {
public:
  enum class Op { Const, Event, Joint, StarSum, Add, Sub, Mul, Div };

  struct RationalFamily {
    std::string name;
    std::function<Rational(const SetValue&)> term;
  };

  static Germ constant(Rational q);
  static Germ event(RandomVariable theta, ClassSpec a);
  static Germ joint(RandomVariable theta, ClassSpec a, RandomVariable nu, ClassSpec b);
  // Sum of family(i) over i in I and T.
  static Germ star_sum(RationalFamily family, ClassSpec index_set);
  // Sum of g_i(T) over the indices i that lie in T.
  static Germ star_sum(std::vector<std::pair<SetValue, Germ>> terms);

  Op op() const noexcept { return node_->op; }
  // Canonical rendering; equal keys mean structurally equal germs.
  const std::string& key() const noexcept { return node_->key; }

  // Throws DivisionUndefined or EmptySnapshot.
  Rational eval(const Snapshot& t) const;
  // nullopt where eval would throw.
  std::optional<Rational> try_eval(const Snapshot& t) const;

  // Accessors for pattern matching by the verdict rules.
  const Rational& constant_value() const { return node_->q; }
  const Germ& lhs() const { return node_->children.at(0); }
  const Germ& rhs() const { return node_->children.at(1); }
  const RandomVariable& rv() const { return *node_->theta; }
  const ClassSpec& cls() const { return *node_->a; }
  const RandomVariable& rv2() const { return *node_->nu; }
  const ClassSpec& cls2() const { return *node_->b; }

  friend Germ operator+(const Germ& x, const Germ& y);
  friend Germ operator-(const Germ& x, const Germ& y);
  friend Germ operator*(const Germ& x, const Germ& y);
  friend Germ operator/(const Germ& x, const Germ& y);

  friend bool structurally_equal(const Germ& x, const Germ& y) { return x.key() == y.key(); }

private:
  struct Node {
    Op op;
    std::string key;
    Rational q;
    std::optional<RandomVariable> theta, nu;
    std::optional<ClassSpec> a, b;
    std::vector<Germ> children;
    std::vector<SetValue> indices;
    std::optional<RationalFamily> family;
  };
  explicit Germ(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Germ binary(Op op, const Germ& x, const Germ& y);
  std::shared_ptr<const Node> node_;
};

enum class ArithOp { Add, Sub, Mul, Div };

Germ germ_of_event(const RandomVariable& theta, const ClassSpec& a);
Germ germ_arith(ArithOp op, const Germ& g1, const Germ& g2);
// Joint(theta in A, nu in B) / Event(nu in B).
Germ conditional_germ(const RandomVariable& theta, const ClassSpec& a, const RandomVariable& nu,
                      const ClassSpec& b);
Germ star_sum(Germ::RationalFamily family, const ClassSpec& index_set);

} // namespace nap

#endif

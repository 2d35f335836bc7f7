#ifndef NAP_RANDOM_VARIABLE_HPP
#define NAP_RANDOM_VARIABLE_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nap/set_value.hpp"
#include "nap/universe.hpp"

namespace nap {

/// A map from states to outcomes.
///
/// Identity and DiagonalPermutation are bijections of the universe and expose
/// preimages; Table is an explicit finite map with a default (identity when
/// no default outcome is given) and makes no bijectivity claim.
class RandomVariable {
public:
  enum class Kind { Identity, DiagonalPermutation, Table };
  using Map = std::function<SetValue(const SetValue&)>;

  static RandomVariable identity();
  static RandomVariable permutation(std::string name, Map forward, Map inverse);
  static RandomVariable table(std::string name, std::map<SetValue, SetValue> entries,
                              std::optional<SetValue> default_outcome = std::nullopt);

  Kind kind() const noexcept { return state_->kind; }
  const std::string& name() const noexcept { return state_->name; }
  bool is_diagonal() const noexcept { return state_->kind != Kind::Table; }

  SetValue operator()(const SetValue& state) const { return state_->forward(state); }

  // The unique state mapped to `outcome`; only for diagonal variables.
  std::optional<SetValue> preimage(const SetValue& outcome) const;

private:
  struct State {
    Kind kind;
    std::string name;
    Map forward;
    Map inverse;
  };
  explicit RandomVariable(std::shared_ptr<const State> s) : state_(std::move(s)) {}
  std::shared_ptr<const State> state_;
};

/// The permutation of V that fixes non-naturals, sends even n to n+2, 1 to 0,
/// and odd n > 1 to n-2.
RandomVariable invar_permutation();

/// Permutes `window` by `perm` (window[i] -> window[perm[i]]) and fixes every
/// other value. Throws ValidationError if perm is not a permutation.
RandomVariable window_permutation(std::string name, std::vector<SetValue> window,
                                  std::vector<std::size_t> perm);

/// Injective on `window`, and every image in the window has its preimage
/// (computed on demand) mapped back onto it.
bool is_bijective_on(const RandomVariable& rv, std::span<const SetValue> window);

/// theta(A) = { theta(x) : x in A } for diagonal theta.
ClassSpec image_class(const Universe& u, const RandomVariable& rv, const ClassSpec& a);

} // namespace nap

#endif

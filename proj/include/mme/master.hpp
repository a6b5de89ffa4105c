#pragma once

// Master-equation operators and the 1/N^2 expansion coefficients.
//
// nabla and L act on polynomials in interpolated variables together with the
// ordered list of time variables they depend on. Repeated application of
// nabla^{k_n} o L o ... o L o nabla^{k_0} to an observable, followed by tau and
// integration over the ordered times, yields the lambda-coefficients of
// alpha_n(lambda, P).

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mme/expalg.hpp"
#include "mme/ncpoly.hpp"
#include "mme/rational.hpp"

namespace mme::master {

using expalg::ExpPoly;
using expalg::Symbol;
using nc::NCPoly;

/// Polynomial in the base variables X_{1..d} with rational coefficients.
class Potential {
 public:
  /// Validates colors, base labels, constant coefficients and trace
  /// self-adjointness (std::invalid_argument otherwise).
  Potential(NCPoly poly, int d);

  const NCPoly& poly() const { return poly_; }
  int d() const { return d_; }
  /// Cyclic derivative D_i V (cached).
  const NCPoly& cyclic_derivative(int color) const { return derivatives_.at(color - 1); }
  /// (rational coefficient, color word) pairs.
  std::vector<std::pair<Rational, std::vector<int>>> monomials() const;

 private:
  NCPoly poly_;
  int d_;
  std::vector<NCPoly> derivatives_;
};

/// Returns the first monomial whose cyclic class is not matched by the
/// reversed class with equal total coefficient, or nullopt if tr V is real.
std::optional<nc::Monomial> trace_self_adjoint_violation(const NCPoly& poly);

/// Polynomial over base labels with constant rational coefficients.
bool is_base_polynomial(const NCPoly& p, int d);

struct OperatorState {
  NCPoly poly;
  nc::History history;
  /// Time symbols sorted increasingly; order.size() == history.n().
  std::vector<Symbol> order;
  /// Drop variables introduced by L with the chain symbol they sit below.
  std::vector<std::pair<Symbol, Symbol>> drops;
  /// Insertion rank chosen at each L application (1-based).
  std::vector<int> pieces;

  static OperatorState initial(const NCPoly& observable);
  int n() const { return history.n(); }
  /// Total order of the times as an integration domain.
  expalg::DomainSpec domain() const;
};

OperatorState nabla(const OperatorState& state, const Potential& v);

/// One output state per insertion rank s = 1..n+1 of the new lower time.
std::vector<OperatorState> op_L(const OperatorState& state);

struct LambdaSeries {
  std::vector<Rational> coeffs;  // coeffs[k] multiplies lambda^k

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  Rational evaluate(const Rational& lambda) const;
  bool is_zero() const;
  friend bool operator==(const LambdaSeries&, const LambdaSeries&) = default;
};

/// Product truncated to the shorter order.
LambdaSeries truncated_product(const LambdaSeries& a, const LambdaSeries& b);

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExpansionOptions {
  /// Largest number of monomials allowed in an intermediate polynomial.
  std::size_t max_terms = 2'000'000;
  unsigned threads = 1;
};

/// alpha_n(lambda, P) as a truncated series in lambda up to order K.
LambdaSeries alpha_series(int genus_order, const Potential& v, const NCPoly& observable, int K,
                          const ExpansionOptions& options = {});

struct AlphaValue {
  Rational value;
  /// |c_K lambda^K|, the last retained term.
  Rational last_term;
};

AlphaValue alpha_eval(int genus_order, const Potential& v, const NCPoly& observable,
                      const Rational& lambda, int K, const ExpansionOptions& options = {});

/// Term-by-term antiderivative of -alpha_n(., V) for n = 0..n_max.
std::vector<LambdaSeries> free_energy_series(const Potential& v, int n_max, int K,
                                             const ExpansionOptions& options = {});

/// lambda * a(lambda) - int_0^lambda a(s) ds, as a series (order K + 1).
LambdaSeries entropy_by_parts(const LambdaSeries& alpha0);
/// int_0^lambda s a'(s) ds, as a series (order K + 1).
LambdaSeries entropy_by_derivative(const LambdaSeries& alpha0);

struct FreeEntropy {
  LambdaSeries series;
  LambdaSeries series_by_derivative;
  Rational value;
  bool forms_agree = false;
};

FreeEntropy free_entropy(const Potential& v, const Rational& lambda, int K,
                         const ExpansionOptions& options = {});

}  // namespace mme::master

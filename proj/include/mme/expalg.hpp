#pragma once

// Exact exponential polynomials in time variables and the integrator over
// ordered time domains.
//
// An ExpPoly is a finite sum  c * prod_s t_s^{p_s} * exp(sum_s (a_s/2) t_s)
// with c rational, p_s >= 0 and a_s integer. The class is closed under
// addition, multiplication and integration over the domains used by the
// expansion engine (bounded integrals from 0 to a symbol, tail integrals to
// infinity).

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mme/rational.hpp"

namespace mme::expalg {

/// Time-variable identifier; symbol k prints as "tk". Symbol 0 is reserved for
/// the constant time t0 = 0 and is never stored.
using Symbol = int;

/// Sparse integer vector indexed by symbol, sorted, without zero entries.
class SymVec {
 public:
  using Entry = std::pair<Symbol, int>;

  SymVec() = default;
  explicit SymVec(std::vector<Entry> entries);

  int get(Symbol s) const;
  void add(Symbol s, int delta);
  void set(Symbol s, int value);
  SymVec& operator+=(const SymVec& other);
  friend SymVec operator+(SymVec a, const SymVec& b) { return a += b; }

  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  friend bool operator==(const SymVec&, const SymVec&) = default;
  friend auto operator<=>(const SymVec&, const SymVec&) = default;

 private:
  std::vector<Entry> entries_;
};

/// Linear form with half-integer coefficients, stored doubled:
/// entry (s, a) stands for (a/2) * t_s.
using HalfLinForm = SymVec;
/// Monomial exponents: entry (s, p) stands for t_s^p, p > 0.
using Powers = SymVec;

struct ExpTerm {
  Rational coeff;
  Powers powers;
  HalfLinForm expo;
};

class ExpPoly {
 public:
  using Key = std::pair<Powers, HalfLinForm>;

  ExpPoly() = default;
  ExpPoly(const Rational& c);  // NOLINT(google-explicit-constructor): constants embed
  ExpPoly(int c) : ExpPoly(Rational(c)) {}  // NOLINT(google-explicit-constructor)

  /// c * exp(expo) with expo given in doubled form.
  static ExpPoly exponential(const HalfLinForm& expo, const Rational& c = 1);
  /// The bare variable t_s.
  static ExpPoly variable(Symbol s);

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  std::vector<ExpTerm> terms() const;
  const std::map<Key, Rational>& raw() const { return terms_; }

  /// Value when every symbol is absent; throws if the polynomial is not constant.
  Rational constant_value() const;
  bool is_constant() const;

  ExpPoly& operator+=(const ExpPoly& other);
  ExpPoly& operator-=(const ExpPoly& other);
  ExpPoly& operator*=(const Rational& c);
  /// In-place multiplication by c * exp(expo).
  ExpPoly& scale_exp(const Rational& c, const HalfLinForm& expo);
  void add_term(const Rational& c, const Powers& powers, const HalfLinForm& expo);

  friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) { return a += b; }
  friend ExpPoly operator-(ExpPoly a, const ExpPoly& b) { return a -= b; }
  friend ExpPoly operator-(ExpPoly a) { return a *= Rational(-1); }
  friend ExpPoly operator*(const ExpPoly& a, const ExpPoly& b);
  friend ExpPoly operator*(ExpPoly a, const Rational& c) { return a *= c; }
  friend ExpPoly operator*(const Rational& c, ExpPoly a) { return a *= c; }

  friend bool operator==(const ExpPoly&, const ExpPoly&) = default;

 private:
  std::map<Key, Rational> terms_;
};

/// Canonical text form, e.g. "2 * t1 * exp((-1/2)*t1 + (1)*t2)"; "0" for zero.
std::string to_string(const ExpPoly& f);

class DivergentIntegral : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integral of f over v in [0, upper].
ExpPoly integrate_drop(const ExpPoly& f, Symbol v, Symbol upper);

/// Integral of f over u in [lower, infinity); lower == 0 means the constant 0.
/// Throws DivergentIntegral if some term has a non-negative u-exponent.
ExpPoly integrate_chain_tail(const ExpPoly& f, Symbol u, Symbol lower);

/// Ordered integration region: 0 <= chain[0] <= chain[1] <= ... (unbounded
/// above), and each drop variable v with anchor p ranges over [0, chain[p]].
struct DomainSpec {
  struct Drop {
    Symbol symbol;
    std::size_t anchor;
  };
  std::vector<Symbol> chain;
  std::vector<Drop> drops;

  /// Throws std::invalid_argument on repeated symbols or bad anchors.
  void validate() const;
};

/// Exact integral of f over the domain: drops first, then the chain from the
/// top down.
Rational integrate_domain(const ExpPoly& f, const DomainSpec& domain);

double eval_numeric(const ExpPoly& f, const std::map<Symbol, double>& assignment);

/// Builds the integrand sum over (n_1..n_k) with 1 <= n_i <= i of
/// exp(-sum_i (t_i - t_{n_i - 1})) on the chain t_1 <= ... <= t_k, and
/// integrates it.
Rational i_k_integral(int k);
/// Closed form: sum over the same tuples of prod_j 1/#{i : n_i <= j <= i}.
Rational i_k_sum(int k);
/// Same closed form restricted to tuples in which no value repeats more than
/// p times.
Rational i_k_restricted_sum(int k, int p);

}  // namespace mme::expalg

#pragma once

// Non-commutative polynomials over the indexed variables X_{i,I}, with
// exponential-polynomial coefficients; derivatives, cyclic derivatives and
// the label substitution maps used by the interpolation operators.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mme/expalg.hpp"

namespace mme::nc {

using expalg::ExpPoly;

/// Ordered list of positive integers. A list of length L living in a context
/// with n times occupies positions n-L+1 .. n (right-aligned).
using IndexList = std::vector<int>;

struct VarLabel {
  int color = 1;
  IndexList index;

  friend bool operator==(const VarLabel&, const VarLabel&) = default;
  friend auto operator<=>(const VarLabel&, const VarLabel&) = default;
};

/// Interned label handle. Equal labels always receive equal ids.
using LabelId = std::uint32_t;

LabelId intern(const VarLabel& label);
const VarLabel& label_of(LabelId id);
inline LabelId base_label(int color) { return intern(VarLabel{color, {}}); }

/// "X<i>" for an empty index list, "X<i>[a,b,...]" otherwise.
std::string to_string(const VarLabel& label);
std::string label_text(LabelId id);

using Monomial = std::vector<LabelId>;
std::string monomial_text(const Monomial& m);

class UnknownLabel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NCPoly {
 public:
  NCPoly() = default;
  static NCPoly unit(const ExpPoly& c = ExpPoly(1));
  static NCPoly variable(LabelId label, const ExpPoly& c = ExpPoly(1));
  static NCPoly monomial(Monomial word, const ExpPoly& c = ExpPoly(1));

  void add_term(const Monomial& word, const ExpPoly& c);
  void add_term(Monomial&& word, ExpPoly&& c);

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::map<Monomial, ExpPoly>& terms() const { return terms_; }
  /// Coefficient of the given word (zero if absent).
  ExpPoly coefficient(const Monomial& word) const;

  NCPoly& operator+=(const NCPoly& other);
  NCPoly& operator-=(const NCPoly& other);
  NCPoly& operator*=(const ExpPoly& c);
  friend NCPoly operator+(NCPoly a, const NCPoly& b) { return a += b; }
  friend NCPoly operator-(NCPoly a, const NCPoly& b) { return a -= b; }
  friend NCPoly operator*(const NCPoly& a, const NCPoly& b);
  friend NCPoly operator*(NCPoly a, const ExpPoly& c) { return a *= c; }
  friend NCPoly operator*(const ExpPoly& c, NCPoly a) { return a *= c; }

  friend bool operator==(const NCPoly&, const NCPoly&) = default;

 private:
  std::map<Monomial, ExpPoly> terms_;
};

/// Canonical text, monomials sorted by their printed form.
std::string to_string(const NCPoly& p);

/// Reversed-word polynomial (the adjoint when coefficients are real).
NCPoly reversed(const NCPoly& p);

/// Finite sum of simple tensors A (x) B with ExpPoly coefficients.
class Tensor {
 public:
  using Key = std::pair<Monomial, Monomial>;

  void add_term(const Monomial& left, const Monomial& right, const ExpPoly& c);
  bool is_zero() const { return terms_.empty(); }
  const std::map<Key, ExpPoly>& terms() const { return terms_; }

  Tensor& operator+=(const Tensor& other);
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  /// Product in the tensor algebra: (A(x)B)(C(x)D) = AC (x) BD.
  friend Tensor operator*(const Tensor& a, const Tensor& b);
  friend bool operator==(const Tensor&, const Tensor&) = default;

  static Tensor simple(const NCPoly& left, const NCPoly& right);

 private:
  std::map<Key, ExpPoly> terms_;
};

std::string to_string(const Tensor& t);

/// Non-commutative derivative with respect to a single variable X_{i,I}.
Tensor partial(const NCPoly& p, LabelId var);

/// Derivative summed over all variables of the given color, each weighted by
/// weight(label); labels for which weight returns nullopt are skipped.
template <typename WeightFn>
Tensor partial_weighted(const NCPoly& p, int color, WeightFn&& weight);

/// Sum of partial derivatives over the labels of color i at level h, where a
/// label has level n - length(I) in a context with n times.
Tensor partial_level(const NCPoly& p, int color, int level, int n);
/// Derivative over every label of color i.
Tensor partial_color(const NCPoly& p, int color);

/// m(A (x) B) = B A applied termwise.
NCPoly multiply_swapped(const Tensor& t);
/// Cyclic derivative D_{i,h} = m o partial_{i,h}.
NCPoly cyclic_D(const NCPoly& p, int color, int level, int n);
/// Cyclic derivative over every label of the color.
NCPoly cyclic_D(const NCPoly& p, int color);

/// (A (x) B) # C = A C B, extended linearly.
NCPoly hash_op(const Tensor& t, const NCPoly& c);

int deg(const NCPoly& p);
/// Largest number of level-h letters in a single monomial.
int deg_level(const NCPoly& p, int level, int n);
/// Number of monomials.
std::size_t nb(const NCPoly& p);
/// Largest |coefficient| at a numeric time assignment.
double c_max(const NCPoly& p, const std::map<expalg::Symbol, double>& times);

// ---------------------------------------------------------------------------
// Histories and label universes.

struct HistoryStep {
  enum class Kind { G, F, Fj };
  Kind kind = Kind::G;
  int j = 0;  // only for Fj

  friend bool operator==(const HistoryStep&, const HistoryStep&) = default;
};

class History {
 public:
  History() = default;
  explicit History(std::vector<HistoryStep> steps);

  History with(HistoryStep step) const;
  const std::vector<HistoryStep>& steps() const { return steps_; }

  /// Largest list length in the universe (= number of time variables).
  int n() const { return n_; }
  /// Largest integer occurring in the universe (0 for {()}).
  int c() const { return c_; }

 private:
  std::vector<HistoryStep> steps_;
  int n_ = 0;
  int c_ = 0;
};

/// Applies the steps of H to the set containing only the empty list.
std::set<IndexList> j_universe(const History& h);
/// Elements of the universe with level h (length n - h).
std::set<IndexList> j_level(const History& h, int level);

/// Label substitution maps.
struct LabelMap {
  enum class Kind { GPlus, F1, F2, F1Tilde, F2Tilde };
  Kind kind = Kind::GPlus;
  int s = 0;  // insertion rank for the F maps, 1..n+1
  int n = 0;  // time count of the source universe
  int c = 0;  // largest integer of the source universe

  static LabelMap g_plus(const History& source);
  static LabelMap f(Kind kind, int s, const History& source);

  IndexList apply(const IndexList& index) const;
  LabelId apply(LabelId label) const;
};

/// Label-wise substitution. When a universe is supplied, every label must
/// belong to it (UnknownLabel otherwise).
NCPoly relabel(const NCPoly& p, const LabelMap& map,
               const std::set<IndexList>* universe = nullptr);
Monomial relabel(const Monomial& m, const LabelMap& map);

// ---------------------------------------------------------------------------

template <typename WeightFn>
Tensor partial_weighted(const NCPoly& p, int color, WeightFn&& weight) {
  Tensor out;
  for (const auto& [word, c] : p.terms()) {
    for (std::size_t pos = 0; pos < word.size(); ++pos) {
      const VarLabel& lab = label_of(word[pos]);
      if (lab.color != color) continue;
      std::optional<ExpPoly> w = weight(word[pos]);
      if (!w) continue;
      Monomial left(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(pos));
      Monomial right(word.begin() + static_cast<std::ptrdiff_t>(pos) + 1, word.end());
      out.add_term(left, right, c * *w);
    }
  }
  return out;
}

}  // namespace mme::nc

#pragma once

// Semicircular covariance model for the interpolated families x^{T} and the
// trace tau computed through non-crossing pairings.
//
// A label X_{i,I} with I = (I_m, ..., I_n) evaluates to
//   e^{t~_{m-1}/2} ( sum_{l=m}^{n} (e^{-t~_{l-1}} - e^{-t~_l})^{1/2} x_i^{I_l}
//                    + e^{-t~_n/2} x_i )
// where t~ are the times sorted increasingly and t~_0 = 0. Only products of
// two weights are ever needed, and those are exponential polynomials.

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mme/expalg.hpp"
#include "mme/ncpoly.hpp"

namespace mme::freewick {

using expalg::ExpPoly;
using expalg::Symbol;
using nc::LabelId;

class OddLength : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Pairing = std::vector<std::pair<int, int>>;

/// All non-crossing perfect matchings of {1..p}, each pair (a, b) with a < b.
std::vector<Pairing> noncrossing_pairings(int p, int max_points = 20);

/// Times in increasing order: order[r-1] is the symbol of rank r.
struct TimeContext {
  std::vector<Symbol> order;

  int n() const { return static_cast<int>(order.size()); }
  /// Doubled linear form of t~_rank (empty for rank 0).
  expalg::HalfLinForm rank_form(int rank, int doubled_coeff) const;
};

struct GeneratorId {
  int color = 1;
  int family = 0;  // 0 stands for the terminal semicircular x

  friend bool operator==(const GeneratorId&, const GeneratorId&) = default;
  friend auto operator<=>(const GeneratorId&, const GeneratorId&) = default;
};

/// Symbolic description of one interpolated variable: a prefactor rank and the
/// generator occupying each position; the terminal generator sits at
/// position n + 1.
struct Interpolant {
  int prefactor_rank = 0;  // m - 1
  std::vector<std::pair<GeneratorId, int>> components;  // (generator, position)
};

Interpolant interpolant(LabelId label, const TimeContext& ctx);

/// Squared weight of the component at the given position (the variance it
/// contributes), including the prefactor.
ExpPoly squared_weight(const Interpolant& x, int position, const TimeContext& ctx);

/// Covariance tau(x_u x_v) of two interpolated variables.
ExpPoly covariance(LabelId u, LabelId v, const TimeContext& ctx);

/// tau on words and polynomials for a fixed time context; caches covariances.
class FreeTrace {
 public:
  explicit FreeTrace(TimeContext ctx) : ctx_(std::move(ctx)) {}

  const TimeContext& context() const { return ctx_; }
  const ExpPoly& cov(LabelId u, LabelId v);
  ExpPoly tau(const nc::Monomial& word);
  ExpPoly tau(const nc::NCPoly& p);
  /// sum of c * tau(A) * tau(B) over the simple tensors.
  ExpPoly tau_tensor(const nc::Tensor& t);

 private:
  TimeContext ctx_;
  std::map<std::pair<LabelId, LabelId>, ExpPoly> cov_cache_;
};

ExpPoly tau(const nc::Monomial& word, const TimeContext& ctx);
ExpPoly tau_poly(const nc::NCPoly& p, const TimeContext& ctx);

/// Right side of the Schwinger-Dyson relation for the interpolated family:
/// sum_v cov(u, v) (tau (x) tau)(partial_v Q).
ExpPoly schwinger_dyson_rhs(const nc::NCPoly& q, LabelId u, const TimeContext& ctx);

}  // namespace mme::freewick

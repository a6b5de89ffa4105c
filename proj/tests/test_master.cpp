#include <random>

#include "doctest.h"
#include "mme/freewick.hpp"
#include "mme/master.hpp"

using namespace mme;
using namespace mme::master;
using nc::Monomial;

namespace {

nc::LabelId X(int c) { return nc::base_label(c); }

NCPoly word(std::initializer_list<int> colors, Rational c = 1) {
  Monomial m;
  for (int k : colors) m.push_back(X(k));
  return NCPoly::monomial(m, ExpPoly(c));
}

NCPoly power(int color, int k) { return NCPoly::monomial(Monomial(static_cast<std::size_t>(k), X(color))); }

LambdaSeries series(std::initializer_list<long> c) {
  LambdaSeries s;
  for (long x : c) s.coeffs.emplace_back(x);
  return s;
}

}  // namespace

TEST_CASE("potential validation") {
  CHECK_NOTHROW(Potential(word({1, 2}), 2));
  CHECK_NOTHROW(Potential(power(1, 4) + power(2, 4) + word({1, 2, 1, 2}), 2));
  CHECK_THROWS_AS(Potential(word({1, 2, 3}), 3), std::invalid_argument);
  CHECK_NOTHROW(Potential(word({1, 2, 3}) + word({3, 2, 1}), 3));
  CHECK_THROWS_AS(Potential(word({3}), 2), std::invalid_argument);
  CHECK_THROWS_AS(Potential(NCPoly::variable(nc::intern({1, {1}})), 1), std::invalid_argument);
  CHECK(trace_self_adjoint_violation(word({1, 1, 2, 3})).has_value());
}

TEST_CASE("nabla") {
  const Potential quad(power(1, 2), 1);
  CHECK(nabla(OperatorState::initial(NCPoly::unit()), quad).poly.is_zero());
  const OperatorState s = nabla(OperatorState::initial(power(1, 2)), quad);
  expalg::HalfLinForm f;
  f.add(1, -1);
  NCPoly expect;
  expect.add_term({nc::intern({1, {1}}), X(1)}, ExpPoly::exponential(f, 2));
  CHECK(s.poly == expect);
  CHECK(s.order == std::vector<Symbol>{1});
  CHECK(s.n() == 1);

  const Potential quart(power(1, 4), 1);
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> len(1, 6);
  for (int t = 0; t < 10; ++t) {
    const int l = len(rng);
    const OperatorState r = nabla(OperatorState::initial(power(1, l)), quart);
    CHECK(nc::deg(r.poly) == l + 4 - 2);
  }
}

TEST_CASE("L pieces") {
  const Potential quart(power(1, 4), 1);
  CHECK(op_L(OperatorState::initial(power(1, 2))).size() == 1);
  for (const auto& piece : op_L(OperatorState::initial(NCPoly::unit()))) CHECK(piece.poly.is_zero());
  const OperatorState s = nabla(nabla(OperatorState::initial(power(1, 2)), quart), quart);
  const auto pieces = op_L(s);
  CHECK(pieces.size() == static_cast<std::size_t>(s.n() + 1));
  for (const auto& p : pieces) CHECK(p.n() == s.n() + 2);
  // L(X^4) is a multiple of the unit: tau evaluates it, integration gives 1
  const auto l4 = op_L(OperatorState::initial(power(1, 4)));
  REQUIRE(l4.size() == 1);
  freewick::FreeTrace trace(freewick::TimeContext{l4[0].order});
  CHECK(expalg::integrate_domain(trace.tau(l4[0].poly), l4[0].domain()) == 1);
}

TEST_CASE("zeroth order is the semicircular moment") {
  const Potential quart(power(1, 4), 1);
  // genus-one Gaussian moments of X^{2k}: number of one-face genus-1 gluings
  const std::vector<long> torus{0, 0, 1, 10, 70};
  for (int k = 0; k <= 4; ++k) {
    const auto s = alpha_series(0, quart, power(1, 2 * k), 0);
    const auto expect = freewick::tau(Monomial(static_cast<std::size_t>(2 * k), X(1)), {});
    CHECK(ExpPoly(s.coeffs[0]) == expect);
    CHECK(alpha_series(1, quart, power(1, 2 * k), 0).coeffs[0] == torus[k]);
  }
  CHECK(alpha_series(1, quart, power(1, 2), 0).is_zero());
  CHECK(alpha_series(2, quart, power(1, 4), 0).is_zero());
}

TEST_CASE("Gaussian potentials") {
  const Potential quad(power(1, 2), 1);
  CHECK(alpha_series(0, quad, power(1, 2), 5) == series({1, -2, 4, -8, 16, -32}));
  CHECK(alpha_series(1, quad, power(1, 2), 4).is_zero());
  // rescaling X by (1+2 lambda)^{-1/2}: ts X^4 = (2 + N^{-2})/(1+2 lambda)^2
  CHECK(alpha_series(0, quad, power(1, 4), 3) == series({2, -8, 24, -64}));
  CHECK(alpha_series(1, quad, power(1, 4), 3) == series({1, -4, 12, -32}));
  CHECK(alpha_series(2, quad, power(1, 4), 2).is_zero());
  const Potential lin(power(1, 1), 1);
  CHECK(alpha_series(0, lin, power(1, 1), 3) == series({0, -1, 0, 0}));
  CHECK(alpha_series(0, lin, power(1, 2), 3) == series({1, 0, 1, 0}));
  CHECK(alpha_series(1, lin, power(1, 2), 3).is_zero());
}

TEST_CASE("linearity in the observable") {
  const Potential quart(power(1, 4), 1);
  const NCPoly p = word({1, 1}, 3) + word({1, 1, 1, 1}, Rational(-1, 2));
  const auto a = alpha_series(1, quart, power(1, 2), 2);
  const auto b = alpha_series(1, quart, power(1, 4), 2);
  const auto c = alpha_series(1, quart, p, 2);
  for (int k = 0; k <= 2; ++k) CHECK(c.coeffs[k] == 3 * a.coeffs[k] - b.coeffs[k] / 2);
}

TEST_CASE("factorization through a free variable") {
  const Potential quart(power(1, 4), 1);
  const NCPoly p = power(1, 2);
  const NCPoly q = power(1, 4);
  const NCPoly joined = p * power(2, 1) * q * power(2, 1);
  CHECK(alpha_series(0, quart, joined, 3) ==
        truncated_product(alpha_series(0, quart, p, 3), alpha_series(0, quart, q, 3)));
}

TEST_CASE("free energy") {
  const Potential quad(power(1, 2), 1);
  const auto fe = free_energy_series(quad, 1, 2);
  REQUIRE(fe.size() == 2);
  CHECK(fe[0].coeffs == std::vector<Rational>{0, -1, 1, Rational(-4, 3)});
  CHECK(fe[1].is_zero());
  const auto k0 = free_energy_series(Potential(power(1, 4), 1), 0, 0);
  CHECK(k0[0].coeffs == std::vector<Rational>{0, -2});
}

TEST_CASE("free entropy") {
  const Potential quad(power(1, 2), 1);
  const FreeEntropy zero = free_entropy(quad, 0, 2);
  CHECK(zero.value == 0);
  CHECK(zero.forms_agree);
  CHECK(zero.series.coeffs == std::vector<Rational>{0, 0, -1, Rational(8, 3)});
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> c(-50, 50);
  for (int t = 0; t < 20; ++t) {
    LambdaSeries a;
    for (int k = 0; k < 6; ++k) a.coeffs.push_back(ratio(c(rng), 7));
    CHECK(entropy_by_parts(a) == entropy_by_derivative(a));
  }
}

TEST_CASE("budget and threads") {
  const Potential quart(power(1, 4), 1);
  ExpansionOptions tiny;
  tiny.max_terms = 3;
  CHECK_THROWS_AS(alpha_series(1, quart, power(1, 4), 3, tiny), BudgetExceeded);
  ExpansionOptions par;
  par.threads = 3;
  CHECK(alpha_series(1, quart, power(1, 2), 2, par) == alpha_series(1, quart, power(1, 2), 2));
  CHECK(alpha_series(0, quart, power(1, 2), 3, par) == alpha_series(0, quart, power(1, 2), 3));
}

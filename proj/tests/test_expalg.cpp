#include <cmath>
#include <random>

#include "doctest.h"
#include "mme/expalg.hpp"

using namespace mme;
using namespace mme::expalg;

namespace {

HalfLinForm form(std::initializer_list<std::pair<Symbol, int>> entries) {
  HalfLinForm f;
  for (auto [s, c] : entries) f.add(s, c);
  return f;
}

ExpPoly e(std::initializer_list<std::pair<Symbol, int>> doubled, Rational c = 1) {
  return ExpPoly::exponential(form(doubled), c);
}

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4 : 2);
  return s * h / 3;
}

}  // namespace

TEST_CASE("addition merges and cancels") {
  CHECK(e({{1, -2}}) + ExpPoly() == e({{1, -2}}));
  CHECK(e({{1, -1}}) + e({{1, -1}}) == e({{1, -1}}, 2));
  CHECK((e({{1, -2}}) - e({{1, -2}})).is_zero());
  ExpPoly f = e({{1, -2}}) + e({{2, 1}}) - e({{1, -2}});
  CHECK(f.size() == 1);
}

TEST_CASE("multiplication adds exponents and powers") {
  CHECK(e({{1, -1}}) * e({{1, -1}}) == e({{1, -2}}));
  ExpPoly t1e = ExpPoly::variable(1) * e({{1, -2}});
  CHECK(t1e * ExpPoly(1) == t1e);
  CHECK((ExpPoly(1) - e({{1, -2}})) * (ExpPoly(1) + e({{1, -2}})) == ExpPoly(1) - e({{1, -4}}));
}

TEST_CASE("bounded integrals") {
  CHECK(integrate_drop(e({{2, -2}}), 2, 1) == ExpPoly(1) - e({{1, -2}}));
  CHECK(integrate_drop(ExpPoly(1), 2, 1) == ExpPoly::variable(1));
  // hand antiderivative of e^{t2/2 - t1}
  const ExpPoly got = integrate_drop(e({{2, 1}, {1, -2}}), 2, 1);
  CHECK(got == e({{1, -1}}, 2) - e({{1, -2}}, 2));
  const double t1 = 1.7;
  const double quad = simpson([&](double t2) { return std::exp(t2 / 2 - t1); }, 0, t1);
  CHECK(eval_numeric(got, {{1, t1}}) == doctest::Approx(quad).epsilon(1e-9));
}

TEST_CASE("tail integrals") {
  CHECK(integrate_chain_tail(e({{1, -2}}), 1, 0) == ExpPoly(1));
  CHECK(integrate_chain_tail(e({{1, -2}}), 1, 5) == e({{5, -2}}));
  CHECK(integrate_chain_tail(ExpPoly::variable(1) * e({{1, -2}}), 1, 0) == ExpPoly(1));
  CHECK_THROWS_AS(integrate_chain_tail(ExpPoly(1), 1, 0), DivergentIntegral);
  CHECK_THROWS_AS(integrate_chain_tail(e({{1, 2}}), 1, 0), DivergentIntegral);
  // t^3 e^{-t/2} on [2, inf) numerically
  ExpPoly f = ExpPoly::variable(1) * ExpPoly::variable(1) * ExpPoly::variable(1) * e({{1, -1}});
  const ExpPoly g = integrate_chain_tail(f, 1, 2);
  const double quad = simpson([](double t) { return t * t * t * std::exp(-t / 2); }, 1.5, 120, 40000);
  CHECK(eval_numeric(g, {{2, 1.5}}) == doctest::Approx(quad).epsilon(1e-7));
}

TEST_CASE("domain integrals") {
  DomainSpec one;
  one.chain = {1};
  CHECK(integrate_domain(e({{1, -2}}), one) == 1);
  DomainSpec two;
  two.chain = {1, 2};
  CHECK(integrate_domain(e({{1, -2}, {2, -2}}), two) == Rational(1, 2));
  DomainSpec bad;
  bad.chain = {1};
  CHECK_THROWS(integrate_domain(e({{2, -2}}), bad));
}

TEST_CASE("Fubini for two drops under one anchor") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> ex(-3, 2);
  for (int trial = 0; trial < 20; ++trial) {
    ExpPoly f;
    for (int k = 0; k < 3; ++k) {
      ExpPoly t = e({{2, ex(rng)}, {3, ex(rng)}, {1, -6}}, k + 1);
      if (k == 1) t = t * ExpPoly::variable(2);
      f += t;
    }
    const ExpPoly a = integrate_drop(integrate_drop(f, 2, 1), 3, 1);
    const ExpPoly b = integrate_drop(integrate_drop(f, 3, 1), 2, 1);
    CHECK(integrate_chain_tail(a, 1, 0) == integrate_chain_tail(b, 1, 0));
  }
}

TEST_CASE("domain integral against hit-or-miss quadrature") {
  // f(t1, t2, v) = e^{-t1} e^{-t2} e^{v/2} (1 + t1) on 0<t1<t2, 0<v<t1
  ExpPoly f = e({{1, -2}, {2, -2}, {3, 1}}) * (ExpPoly(1) + ExpPoly::variable(1));
  DomainSpec d;
  d.chain = {1, 2};
  d.drops.push_back({3, 0});
  const double exact = to_double(integrate_domain(f, d));
  std::mt19937_64 rng(42);
  std::exponential_distribution<double> ex(0.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // importance sample t1, t2 ~ Exp(1/2); v uniform on [0, t1]
  double sum = 0;
  const int n = 400000;
  for (int k = 0; k < n; ++k) {
    const double t1 = ex(rng);
    const double t2 = ex(rng);
    if (t1 > t2) continue;
    const double v = u(rng) * t1;
    const double density = 0.25 * std::exp(-0.5 * (t1 + t2)) / t1;
    sum += eval_numeric(f, {{1, t1}, {2, t2}, {3, v}}) / density;
  }
  CHECK(sum / n == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("I_k closed form") {
  CHECK(i_k_sum(1) == 1);
  CHECK(i_k_sum(2) == Rational(3, 2));
  CHECK(i_k_integral(2) == Rational(3, 2));
  for (int k = 1; k <= 6; ++k) {
    CHECK(i_k_integral(k) == i_k_sum(k));
    CHECK(i_k_sum(k) <= (1 << k) * i_k_restricted_sum(k, 2));
  }
}

TEST_CASE("numeric evaluation") {
  CHECK(eval_numeric(e({{1, -2}}), {{1, 0.0}}) == 1.0);
  CHECK(eval_numeric(ExpPoly(1) - e({{1, -2}}), {{1, 0.0}}) == 0.0);
  CHECK(eval_numeric(ExpPoly::variable(1) * e({{1, -2}}), {{1, 1.0}}) ==
        doctest::Approx(0.36787944117144233));
}

TEST_CASE("text form") {
  CHECK(to_string(ExpPoly()) == "0");
  CHECK(to_string(ExpPoly::variable(1) * e({{1, -1}, {2, 2}}, 2)) ==
        "2 * t1 * exp((-1/2)*t1 + (1)*t2)");
}

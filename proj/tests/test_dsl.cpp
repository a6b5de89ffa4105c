#include <random>

#include "doctest.h"
#include "mme/dsl.hpp"

using namespace mme;
using namespace mme::dsl;

namespace {

nc::NCPoly word(std::initializer_list<int> colors, Rational c = 1) {
  nc::Monomial m;
  for (int k : colors) m.push_back(nc::base_label(k));
  return nc::NCPoly::monomial(m, expalg::ExpPoly(c));
}

std::size_t error_offset(std::string_view src) {
  try {
    parse(src);
  } catch (const ParseError& e) {
    return e.offset();
  }
  return std::string::npos;
}

}  // namespace

TEST_CASE("parsing") {
  const PotentialSpec quart = parse("X1^4");
  CHECK(quart.d == 1);
  REQUIRE(quart.terms.size() == 1);
  CHECK(quart.terms[0].colors == std::vector<int>{1, 1, 1, 1});
  CHECK(print(quart) == "1*X1^4");

  const PotentialSpec two = parse("X1^4 + X2^4 + X1*X2*X1*X2");
  CHECK(two.d == 2);
  CHECK(to_ncpoly(two) == word({1, 1, 1, 1}) + word({2, 2, 2, 2}) + word({1, 2, 1, 2}));
  CHECK(parse("X1", 3).d == 3);
  CHECK_THROWS_AS(parse("X4", 3), std::invalid_argument);

  CHECK(to_ncpoly(parse("1/3*X1 - 2 X2^2")) == word({1}, Rational(1, 3)) + word({2, 2}, -2));
  CHECK(to_ncpoly(parse("0.25*X1 + 1.5e1")) == word({1}, Rational(1, 4)) + word({}, 15));
  CHECK(to_ncpoly(parse("0.1*X1")) == word({1}, Rational(1, 10)));
}

TEST_CASE("self-adjointness") {
  CHECK_NOTHROW(parse_potential("0.5*X1*X2 + 0.5*X2*X1"));
  CHECK_NOTHROW(parse_potential("X1*X2"));
  CHECK_NOTHROW(parse_potential("X1*X2*X3 + X3*X2*X1"));
  try {
    parse_potential("i*X1");
    FAIL("accepted an imaginary linear term");
  } catch (const SelfAdjointError& e) {
    CHECK(e.monomial() == "X1");
  }
  CHECK_THROWS_AS(parse_potential("X1*X2*X3"), SelfAdjointError);
  const PotentialSpec complex = parse_potential("2*i*X1*X2 - 2*i*X2*X1");
  CHECK_THROWS_AS(to_potential(complex), std::invalid_argument);
}

TEST_CASE("parse errors report byte offsets") {
  CHECK(error_offset("X1 + ") == 5);
  CHECK(error_offset("X1 * Y2") == 5);
  CHECK(error_offset("X1^") == 3);
  CHECK(error_offset("3/0*X1") != std::string::npos);
  CHECK(error_offset("X1 + X2") == std::string::npos);
  try {
    parse("X1 $");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("at byte 3") != std::string::npos);
  }
}

TEST_CASE("print and parse round-trip") {
  std::mt19937 rng(77);
  std::uniform_int_distribution<int> nterms(1, 5), len(0, 5), color(1, 3), num(-9, 9), den(1, 6),
      flag(0, 3);
  for (int t = 0; t < 200; ++t) {
    PotentialSpec spec;
    spec.d = 3;
    const int n = nterms(rng);
    for (int k = 0; k < n; ++k) {
      Term term;
      do term.coeff = ratio(num(rng), den(rng));
      while (term.coeff == 0);
      term.imaginary = flag(rng) == 0;
      const int l = len(rng);
      for (int j = 0; j < l; ++j) term.colors.push_back(color(rng));
      spec.terms.push_back(term);
    }
    CHECK(parse(print(spec), 3) == spec);
  }
}

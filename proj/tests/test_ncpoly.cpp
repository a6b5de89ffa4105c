#include <random>

#include "doctest.h"
#include "mme/ncpoly.hpp"

using namespace mme;
using namespace mme::nc;

namespace {

LabelId X(int color, IndexList index = {}) { return intern(VarLabel{color, std::move(index)}); }

NCPoly word(std::initializer_list<LabelId> w) { return NCPoly::monomial(Monomial(w)); }

NCPoly random_poly(std::mt19937& rng, int max_deg) {
  std::uniform_int_distribution<int> color(1, 3), len(0, max_deg), coef(-3, 3);
  NCPoly p;
  for (int t = 0; t < 3; ++t) {
    Monomial m;
    const int l = len(rng);
    for (int k = 0; k < l; ++k) m.push_back(X(color(rng)));
    p.add_term(m, ExpPoly(coef(rng)));
  }
  return p;
}

const History kEmpty;
const History kG = kEmpty.with({HistoryStep::Kind::G, 0});

}  // namespace

TEST_CASE("label universes") {
  CHECK(j_universe(kEmpty) == std::set<IndexList>{{}});
  CHECK(j_universe(kG) == std::set<IndexList>{{}, {1}});
  const History gg = kG.with({HistoryStep::Kind::G, 0});
  CHECK(j_universe(gg) == std::set<IndexList>{{}, {2}, {1, 2}});
  for (const History& h : {kEmpty, kG, gg, gg.with({HistoryStep::Kind::F, 0}),
                           kG.with({HistoryStep::Kind::F, 0}).with({HistoryStep::Kind::G, 0})}) {
    std::size_t total = 0;
    for (int level = 0; level <= h.n(); ++level) total += j_level(h, level).size();
    CHECK(total == j_universe(h).size());
  }
}

TEST_CASE("relabeling") {
  CHECK(relabel(NCPoly::variable(X(1)), LabelMap::g_plus(kEmpty)) == NCPoly::variable(X(1, {1})));
  CHECK(relabel(NCPoly::unit(), LabelMap::g_plus(kG)) == NCPoly::unit());
  const LabelMap f1 = LabelMap::f(LabelMap::Kind::F1, 1, kG);
  CHECK(relabel(NCPoly::variable(X(1, {1})), f1) == NCPoly::variable(X(1, {2, 1, 4})));
  const auto universe = j_universe(kEmpty);
  CHECK_THROWS_AS(relabel(NCPoly::variable(X(1, {7})), LabelMap::g_plus(kEmpty), &universe),
                  UnknownLabel);
}

TEST_CASE("relabeling is injective and preserves degree") {
  const History h = kG.with({HistoryStep::Kind::F, 0}).with({HistoryStep::Kind::G, 0});
  const auto universe = j_universe(h);
  std::vector<LabelMap> maps{LabelMap::g_plus(h)};
  for (int s = 1; s <= h.n() + 1; ++s) {
    for (auto k : {LabelMap::Kind::F1, LabelMap::Kind::F2, LabelMap::Kind::F1Tilde,
                   LabelMap::Kind::F2Tilde}) {
      maps.push_back(LabelMap::f(k, s, h));
    }
  }
  for (const auto& m : maps) {
    std::set<IndexList> image;
    for (const auto& idx : universe) image.insert(m.apply(idx));
    CHECK(image.size() == universe.size());
  }
  std::mt19937 rng(5);
  for (int t = 0; t < 20; ++t) {
    NCPoly p = random_poly(rng, 5);
    CHECK(deg(relabel(p, LabelMap::g_plus(kEmpty))) == deg(p));
  }
}

TEST_CASE("non-commutative derivative") {
  const LabelId x1 = X(1), x2 = X(2);
  Tensor expect;
  expect.add_term({}, {x2, x1}, ExpPoly(1));
  expect.add_term({x1, x2}, {}, ExpPoly(1));
  CHECK(partial(word({x1, x2, x1}), x1) == expect);
  CHECK(partial(word({x2}), x1).is_zero());
  Tensor sq;
  sq.add_term({}, {x1}, ExpPoly(1));
  sq.add_term({x1}, {}, ExpPoly(1));
  CHECK(partial(word({x1, x1}), x1) == sq);
}

TEST_CASE("derivative is a derivation") {
  std::mt19937 rng(11);
  for (int t = 0; t < 30; ++t) {
    const NCPoly p = random_poly(rng, 6);
    const NCPoly q = random_poly(rng, 6);
    for (int c = 1; c <= 3; ++c) {
      const LabelId v = X(c);
      Tensor rhs = partial(p, v) * Tensor::simple(NCPoly::unit(), q);
      rhs += Tensor::simple(p, NCPoly::unit()) * partial(q, v);
      CHECK(partial(p * q, v) == rhs);
    }
  }
}

TEST_CASE("cyclic derivatives") {
  const LabelId x1 = X(1), x2 = X(2);
  NCPoly two_x;
  two_x.add_term({x1}, ExpPoly(2));
  CHECK(cyclic_D(word({x1, x1}), 1, 0, 0) == two_x);
  CHECK(cyclic_D(word({x1, x2}), 1, 0, 0) == word({x2}));
  NCPoly four;
  four.add_term({x1, x1, x1}, ExpPoly(4));
  CHECK(cyclic_D(word({x1, x1, x1, x1}), 1) == four);
}

TEST_CASE("hash operation and counters") {
  const LabelId x1 = X(1), x2 = X(2);
  CHECK(hash_op(Tensor::simple(word({x1}), word({x2})), NCPoly::unit()) == word({x1, x2}));
  const NCPoly p = word({x2, x1, x2});
  CHECK(hash_op(Tensor::simple(NCPoly::unit(), NCPoly::unit()), p) == p);
  Tensor t = Tensor::simple(word({x1}), NCPoly::unit());
  t += Tensor::simple(NCPoly::unit(), word({x1}));
  CHECK(hash_op(t, word({x2})) == word({x1, x2}) + word({x2, x1}));
  CHECK(deg(word({x1, x2, x1})) == 3);
  CHECK(deg_level(word({X(1), X(1, {1})}), 0, 1) == 1);
  NCPoly lin;
  lin.add_term({x1}, ExpPoly(2));
  lin.add_term({x2}, ExpPoly(1));
  CHECK(nb(lin) == 2);
}

TEST_CASE("canonical text") {
  CHECK(label_text(X(1)) == "X1");
  CHECK(label_text(X(1, {2, 1, 4})) == "X1[2,1,4]");
  CHECK(monomial_text({}) == "1");
}

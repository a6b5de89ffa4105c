#include <random>

#include "doctest.h"
#include "mme/freewick.hpp"

using namespace mme;
using namespace mme::freewick;
using nc::IndexList;
using nc::Monomial;
using nc::VarLabel;

namespace {

LabelId X(int color, IndexList index = {}) { return nc::intern(VarLabel{color, std::move(index)}); }

BigInt catalan(int k) {
  BigInt c = 1;
  for (int j = 0; j < k; ++j) c = c * 2 * (2 * j + 1) / (j + 2);
  return c;
}

// Brute force: all perfect matchings, keeping those without a crossing.
int count_noncrossing_brute(int p) {
  std::vector<int> match(static_cast<std::size_t>(p), -1);
  int count = 0;
  std::function<void()> rec = [&] {
    int first = 0;
    while (first < p && match[first] >= 0) ++first;
    if (first == p) {
      for (int a = 0; a < p; ++a) {
        for (int b = 0; b < p; ++b) {
          const int a2 = match[a], b2 = match[b];
          if (a < b && b < a2 && a2 < b2) return;
        }
      }
      ++count;
      return;
    }
    for (int o = first + 1; o < p; ++o) {
      if (match[o] >= 0) continue;
      match[first] = o;
      match[o] = first;
      rec();
      match[first] = match[o] = -1;
    }
  };
  rec();
  return count;
}

const TimeContext kNone{};

}  // namespace

TEST_CASE("non-crossing pairings") {
  CHECK(noncrossing_pairings(2).size() == 1);
  CHECK(noncrossing_pairings(4).size() == 2);
  CHECK(noncrossing_pairings(6).size() == 5);
  for (int p = 0; p <= 12; p += 2) {
    CHECK(static_cast<int>(noncrossing_pairings(p).size()) == count_noncrossing_brute(p));
  }
  CHECK_THROWS_AS(noncrossing_pairings(3), OddLength);
}

TEST_CASE("covariances") {
  CHECK(covariance(X(1), X(1), kNone) == ExpPoly(1));
  CHECK(covariance(X(1), X(2), kNone).is_zero());
  const TimeContext one{{1}};
  const ExpPoly c = covariance(X(1, {1}), X(1), one);
  CHECK(c == ExpPoly::exponential([] {
          expalg::HalfLinForm f;
          f.add(1, -1);
          return f;
        }()));
  // endpoints of the interpolation
  CHECK(expalg::eval_numeric(c, {{1, 0.0}}) == doctest::Approx(1.0));
  CHECK(expalg::eval_numeric(c, {{1, 60.0}}) < 1e-12);
  // variance of an interpolated variable is 1
  const TimeContext two{{1, 2}};
  for (const LabelId u : {X(1), X(1, {2}), X(1, {1, 2})}) {
    CHECK(expalg::eval_numeric(covariance(u, u, two), {{1, 0.4}, {2, 1.3}}) ==
          doctest::Approx(1.0));
  }
}

TEST_CASE("semicircular moments") {
  const LabelId x1 = X(1), x2 = X(2);
  CHECK(tau(Monomial{x1, x1}, kNone) == ExpPoly(1));
  CHECK(tau(Monomial{x1, x1, x1, x1}, kNone) == ExpPoly(2));
  CHECK(tau(Monomial{x1, x2, x1, x2}, kNone).is_zero());
  CHECK(tau(Monomial{x1, x1, x1}, kNone).is_zero());
  for (int k = 0; k <= 6; ++k) {
    CHECK(tau(Monomial(static_cast<std::size_t>(2 * k), x1), kNone) == ExpPoly(Rational(catalan(k))));
  }
  CHECK(tau_poly(nc::NCPoly::unit(), kNone) == ExpPoly(1));
  expalg::HalfLinForm f;
  f.add(1, -2);
  const ExpPoly w = ExpPoly::exponential(f);
  CHECK(tau_poly(nc::NCPoly::monomial({x1, x1}, w), TimeContext{{1}}) == w);
}

namespace {

// Labels of a universe built from G and F steps, with their time context.
struct Setting {
  std::vector<LabelId> labels;
  TimeContext ctx;
};

Setting setting(const nc::History& h, int d) {
  Setting s;
  for (const auto& idx : nc::j_universe(h)) {
    for (int c = 1; c <= d; ++c) s.labels.push_back(X(c, idx));
  }
  for (int k = 1; k <= h.n(); ++k) s.ctx.order.push_back(k);
  return s;
}

Monomial random_word(std::mt19937& rng, const std::vector<LabelId>& labels, int len) {
  std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
  Monomial m;
  for (int k = 0; k < len; ++k) m.push_back(labels[pick(rng)]);
  return m;
}

}  // namespace

TEST_CASE("Schwinger-Dyson relation") {
  using K = nc::HistoryStep::Kind;
  const nc::History h0;
  const nc::History hg = h0.with({K::G, 0});
  const nc::History hgf = hg.with({K::F, 0});
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> dpick(1, 3), len(0, 7);
  int checked = 0;
  for (const nc::History& h : {h0, hg, hgf}) {
    for (int trial = 0; trial < 25; ++trial) {
      const int d = dpick(rng);
      const Setting s = setting(h, d);
      const Monomial q = random_word(rng, s.labels, len(rng));
      const LabelId u = random_word(rng, s.labels, 1)[0];
      Monomial qu = q;
      qu.push_back(u);
      CHECK(tau(qu, s.ctx) == schwinger_dyson_rhs(nc::NCPoly::monomial(q), u, s.ctx));
      ++checked;
    }
  }
  CHECK(checked == 75);
}

TEST_CASE("traciality and positivity") {
  using K = nc::HistoryStep::Kind;
  const nc::History h = nc::History().with({K::G, 0}).with({K::G, 0});
  const Setting s = setting(h, 2);
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> len(0, 5);
  std::uniform_real_distribution<double> t(0.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Monomial p = random_word(rng, s.labels, len(rng));
    const Monomial q = random_word(rng, s.labels, len(rng));
    Monomial pq = p, qp = q;
    pq.insert(pq.end(), q.begin(), q.end());
    qp.insert(qp.end(), p.begin(), p.end());
    CHECK(tau(pq, s.ctx) == tau(qp, s.ctx));
    Monomial mm = p;
    mm.insert(mm.end(), p.rbegin(), p.rend());
    const double t1 = t(rng);
    const double t2 = t1 + t(rng);
    CHECK(expalg::eval_numeric(tau(mm, s.ctx), {{1, t1}, {2, t2}}) >= -1e-12);
  }
}

#include "mme/master.hpp"

#include <algorithm>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <unordered_map>

#include "mme/freewick.hpp"

namespace mme::master {

using nc::LabelId;
using nc::LabelMap;
using nc::Monomial;

namespace {

Monomial rotate_after(const Monomial& w, std::size_t pos) {
  Monomial out;
  out.reserve(w.size() - 1);
  out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(pos) + 1, w.end());
  out.insert(out.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(pos));
  return out;
}

Monomial min_rotation(const Monomial& w) {
  Monomial best = w;
  Monomial cur = w;
  for (std::size_t k = 1; k < w.size(); ++k) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (cur < best) best = cur;
  }
  return best;
}

int level_of(LabelId id, int n) { return n - static_cast<int>(nc::label_of(id).index.size()); }

expalg::HalfLinForm rank_form(const std::vector<Symbol>& order, int rank, int doubled) {
  expalg::HalfLinForm out;
  if (rank > 0) out.add(order[static_cast<std::size_t>(rank - 1)], doubled);
  return out;
}

// Memoized label substitution for one map.
class CachedMap {
 public:
  explicit CachedMap(LabelMap map) : map_(map) {}
  LabelId operator()(LabelId id) {
    auto it = cache_.find(id);
    if (it != cache_.end()) return it->second;
    const LabelId out = map_.apply(id);
    cache_.emplace(id, out);
    return out;
  }
  void append(Monomial& out, Monomial::const_iterator first, Monomial::const_iterator last) {
    for (; first != last; ++first) out.push_back((*this)(*first));
  }

 private:
  LabelMap map_;
  std::unordered_map<LabelId, LabelId> cache_;
};

void check_budget(const NCPoly& p, const ExpansionOptions& options) {
  if (p.size() > options.max_terms) {
    throw BudgetExceeded("intermediate polynomial has " + std::to_string(p.size()) +
                         " monomials, above the budget of " + std::to_string(options.max_terms));
  }
}

}  // namespace

bool is_base_polynomial(const NCPoly& p, int d) {
  for (const auto& [w, c] : p.terms()) {
    if (!c.is_constant()) return false;
    for (LabelId id : w) {
      const auto& lab = nc::label_of(id);
      if (!lab.index.empty() || lab.color < 1 || lab.color > d) return false;
    }
  }
  return true;
}

std::optional<Monomial> trace_self_adjoint_violation(const NCPoly& poly) {
  std::map<Monomial, Rational> class_sum;
  for (const auto& [w, c] : poly.terms()) class_sum[min_rotation(w)] += c.constant_value();
  for (const auto& [w, c] : poly.terms()) {
    const Monomial cls = min_rotation(w);
    const Monomial rev_cls = min_rotation(Monomial(w.rbegin(), w.rend()));
    const Rational mine = class_sum[cls];
    auto it = class_sum.find(rev_cls);
    const Rational theirs = it == class_sum.end() ? Rational(0) : it->second;
    if (mine != theirs) return w;
  }
  return std::nullopt;
}

Potential::Potential(NCPoly poly, int d) : poly_(std::move(poly)), d_(d) {
  if (d < 1) throw std::invalid_argument("potential arity must be at least 1");
  if (!is_base_polynomial(poly_, d)) {
    throw std::invalid_argument(
        "potential must use base variables X1..X" + std::to_string(d) +
        " with rational coefficients");
  }
  if (auto bad = trace_self_adjoint_violation(poly_)) {
    throw std::invalid_argument("potential is not trace self-adjoint: monomial " +
                                nc::monomial_text(*bad) + " has no matching reversed term");
  }
  for (int i = 1; i <= d; ++i) derivatives_.push_back(nc::cyclic_D(poly_, i));
}

std::vector<std::pair<Rational, std::vector<int>>> Potential::monomials() const {
  std::vector<std::pair<Rational, std::vector<int>>> out;
  for (const auto& [w, c] : poly_.terms()) {
    std::vector<int> colors;
    for (LabelId id : w) colors.push_back(nc::label_of(id).color);
    out.emplace_back(c.constant_value(), std::move(colors));
  }
  return out;
}

OperatorState OperatorState::initial(const NCPoly& observable) {
  OperatorState s;
  s.poly = observable;
  return s;
}

expalg::DomainSpec OperatorState::domain() const {
  expalg::DomainSpec d;
  d.chain = order;
  return d;
}

OperatorState nabla(const OperatorState& state, const Potential& v) {
  const int n = state.n();
  const Symbol fresh = n + 1;
  CachedMap g_plus(LabelMap::g_plus(state.history));
  const Rational half(1, 2);

  NCPoly out;
  for (const auto& [w, coef] : state.poly.terms()) {
    for (std::size_t p = 0; p < w.size(); ++p) {
      const int color = nc::label_of(w[p]).color;
      if (color > v.d()) continue;
      const NCPoly& dv = v.cyclic_derivative(color);
      if (dv.is_zero()) continue;
      expalg::HalfLinForm expo = rank_form(state.order, level_of(w[p], n), 1);
      expo.add(fresh, -1);
      ExpPoly scaled = coef;
      scaled.scale_exp(half, expo);

      Monomial head;
      head.reserve(w.size() - 1);
      g_plus.append(head, w.begin() + static_cast<std::ptrdiff_t>(p) + 1, w.end());
      g_plus.append(head, w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p));
      for (const auto& [dw, dc] : dv.terms()) {
        Monomial word = head;
        word.insert(word.end(), dw.begin(), dw.end());
        out.add_term(std::move(word), scaled * dc);
      }
    }
  }

  OperatorState next;
  next.poly = std::move(out);
  next.history = state.history.with({nc::HistoryStep::Kind::G, 0});
  next.order = state.order;
  next.order.push_back(fresh);
  next.drops = state.drops;
  next.pieces = state.pieces;
  return next;
}

std::vector<OperatorState> op_L(const OperatorState& state) {
  const int n = state.n();
  const Symbol upper = n + 1;  // new chain time
  const Symbol lower = n + 2;  // new time below it

  // sum_{i,h,k} e^{(t~_h + t~_k)/2} partial_{i,k} D_{i,h} Q
  nc::Tensor second;
  for (const auto& [w, coef] : state.poly.terms()) {
    for (std::size_t p = 0; p < w.size(); ++p) {
      const int color = nc::label_of(w[p]).color;
      const expalg::HalfLinForm e1 = rank_form(state.order, level_of(w[p], n), 1);
      const Monomial r = rotate_after(w, p);
      for (std::size_t q = 0; q < r.size(); ++q) {
        if (nc::label_of(r[q]).color != color) continue;
        ExpPoly c = coef;
        c.scale_exp(1, e1 + rank_form(state.order, level_of(r[q], n), 1));
        second.add_term(Monomial(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(q)),
                        Monomial(r.begin() + static_cast<std::ptrdiff_t>(q) + 1, r.end()), c);
      }
    }
  }

  std::vector<OperatorState> pieces;
  const nc::History next_history = state.history.with({nc::HistoryStep::Kind::F, 0});
  for (int s = 1; s <= n + 1; ++s) {
    CachedMap f1(LabelMap::f(LabelMap::Kind::F1, s, state.history));
    CachedMap f1t(LabelMap::f(LabelMap::Kind::F1Tilde, s, state.history));
    CachedMap f2(LabelMap::f(LabelMap::Kind::F2, s, state.history));
    CachedMap f2t(LabelMap::f(LabelMap::Kind::F2Tilde, s, state.history));

    // Entry at position s, or 0 when s = n + 1 (the shared new entry).
    auto entry_at_s = [&](LabelId id) {
      if (s == n + 1) return 0;
      const auto& idx = nc::label_of(id).index;
      const int first = n - static_cast<int>(idx.size()) + 1;
      return idx[static_cast<std::size_t>(s - first)];
    };

    expalg::HalfLinForm tail;
    tail.add(upper, -2);
    tail.add(lower, -2);

    NCPoly out;
    for (const auto& [key, coef] : second.terms()) {
      const Monomial& a = key.first;
      const Monomial& b = key.second;
      for (std::size_t p = 0; p < a.size(); ++p) {
        const int lvl_a = level_of(a[p], n);
        if (lvl_a > s - 1) continue;
        const int color = nc::label_of(a[p]).color;
        const int ent_a = entry_at_s(a[p]);
        for (std::size_t q = 0; q < b.size(); ++q) {
          if (nc::label_of(b[q]).color != color) continue;
          const int lvl_b = level_of(b[q], n);
          if (lvl_b > s - 1) continue;
          if (entry_at_s(b[q]) != ent_a) continue;

          expalg::HalfLinForm expo = tail;
          expo += rank_form(state.order, lvl_a, 1);
          expo += rank_form(state.order, lvl_b, 1);
          ExpPoly c = coef;
          c.scale_exp(Rational(1, 2), expo);

          Monomial word;
          word.reserve(a.size() + b.size() - 2);
          f1.append(word, a.begin() + static_cast<std::ptrdiff_t>(p) + 1, a.end());
          f1t.append(word, a.begin(), a.begin() + static_cast<std::ptrdiff_t>(p));
          f2t.append(word, b.begin() + static_cast<std::ptrdiff_t>(q) + 1, b.end());
          f2.append(word, b.begin(), b.begin() + static_cast<std::ptrdiff_t>(q));
          out.add_term(std::move(word), std::move(c));
        }
      }
    }

    OperatorState piece;
    piece.poly = std::move(out);
    piece.history = next_history;
    piece.order = state.order;
    piece.order.insert(piece.order.begin() + (s - 1), lower);
    piece.order.push_back(upper);
    piece.drops = state.drops;
    piece.drops.emplace_back(lower, upper);
    piece.pieces = state.pieces;
    piece.pieces.push_back(s);
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

Rational LambdaSeries::evaluate(const Rational& lambda) const {
  Rational out(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) out = out * lambda + *it;
  return out;
}

bool LambdaSeries::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& c) { return c == 0; });
}

LambdaSeries truncated_product(const LambdaSeries& a, const LambdaSeries& b) {
  const int order = std::min(a.order(), b.order());
  LambdaSeries out;
  out.coeffs.assign(static_cast<std::size_t>(order + 1), Rational(0));
  for (int i = 0; i <= order; ++i) {
    for (int j = 0; i + j <= order; ++j) {
      out.coeffs[static_cast<std::size_t>(i + j)] +=
          a.coeffs[static_cast<std::size_t>(i)] * b.coeffs[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

namespace {

Rational integrate_state(const OperatorState& state) {
  freewick::FreeTrace trace(freewick::TimeContext{state.order});
  const ExpPoly integrand = trace.tau(state.poly);
  if (integrand.is_zero()) return 0;
  return expalg::integrate_domain(integrand, state.domain());
}

class Expansion {
 public:
  Expansion(int genus_order, const Potential& v, int K, const ExpansionOptions& options)
      : genus_(genus_order), v_(v), K_(K), options_(options) {
    coeffs_.assign(static_cast<std::size_t>(K + 1), Rational(0));
  }

  void run(const OperatorState& root) {
    if (options_.threads <= 1) {
      visit(root, 0, 0);
      return;
    }
    // Split at the first layer: the chain of nabla applications from the root
    // is cheap; each of its L-pieces (or evaluations) becomes a task.
    std::vector<std::future<void>> tasks;
    OperatorState cur = root;
    for (int k = 0; k <= K_ && !cur.poly.is_zero(); ++k) {
      if (genus_ == 0) {
        tasks.push_back(std::async(std::launch::async, [this, cur, k] { accumulate(cur, k); }));
      } else {
        for (auto& piece : op_L(cur)) {
          check_budget(piece.poly, options_);
          tasks.push_back(std::async(std::launch::async,
                                     [this, piece = std::move(piece), k] { visit(piece, 1, k); }));
        }
      }
      if (k < K_) {
        cur = nabla(cur, v_);
        check_budget(cur.poly, options_);
      }
      if (tasks.size() >= options_.threads) {
        for (auto& t : tasks) t.get();
        tasks.clear();
      }
    }
    for (auto& t : tasks) t.get();
  }

  LambdaSeries result() const { return LambdaSeries{coeffs_}; }

 private:
  void accumulate(const OperatorState& state, int k) {
    Rational value = integrate_state(state);
    if (k % 2 == 1) value = -value;
    std::lock_guard lock(mutex_);
    coeffs_[static_cast<std::size_t>(k)] += value;
  }

  void visit(const OperatorState& state, int l_count, int k) {
    if (state.poly.is_zero()) return;
    if (l_count == genus_) accumulate(state, k);
    if (k < K_) {
      OperatorState next = nabla(state, v_);
      check_budget(next.poly, options_);
      visit(next, l_count, k + 1);
    }
    if (l_count < genus_) {
      for (const auto& piece : op_L(state)) {
        check_budget(piece.poly, options_);
        visit(piece, l_count + 1, k);
      }
    }
  }

  int genus_;
  const Potential& v_;
  int K_;
  ExpansionOptions options_;
  std::mutex mutex_;
  std::vector<Rational> coeffs_;
};

}  // namespace

LambdaSeries alpha_series(int genus_order, const Potential& v, const NCPoly& observable, int K,
                          const ExpansionOptions& options) {
  if (K < 0 || genus_order < 0) throw std::invalid_argument("alpha_series: negative order");
  if (!is_base_polynomial(observable, std::max(v.d(), 64))) {
    throw std::invalid_argument("observable must be a polynomial in base variables");
  }
  Expansion expansion(genus_order, v, K, options);
  expansion.run(OperatorState::initial(observable));
  return expansion.result();
}

AlphaValue alpha_eval(int genus_order, const Potential& v, const NCPoly& observable,
                      const Rational& lambda, int K, const ExpansionOptions& options) {
  const LambdaSeries series = alpha_series(genus_order, v, observable, K, options);
  Rational last = series.coeffs.back();
  for (int k = 0; k < K; ++k) last *= lambda;
  return AlphaValue{series.evaluate(lambda), abs(last)};
}

std::vector<LambdaSeries> free_energy_series(const Potential& v, int n_max, int K,
                                             const ExpansionOptions& options) {
  std::vector<LambdaSeries> out;
  for (int n = 0; n <= n_max; ++n) {
    const LambdaSeries alpha = alpha_series(n, v, v.poly(), K, options);
    LambdaSeries energy;
    energy.coeffs.assign(static_cast<std::size_t>(K + 2), Rational(0));
    for (int k = 0; k <= K; ++k) {
      energy.coeffs[static_cast<std::size_t>(k + 1)] = -alpha.coeffs[static_cast<std::size_t>(k)] /
                                                       (k + 1);
    }
    out.push_back(std::move(energy));
  }
  return out;
}

LambdaSeries entropy_by_parts(const LambdaSeries& alpha0) {
  LambdaSeries out;
  out.coeffs.assign(alpha0.coeffs.size() + 1, Rational(0));
  for (std::size_t k = 0; k < alpha0.coeffs.size(); ++k) {
    out.coeffs[k + 1] += alpha0.coeffs[k];                               // lambda * alpha
    out.coeffs[k + 1] -= alpha0.coeffs[k] / static_cast<long>(k + 1);    // antiderivative
  }
  return out;
}

LambdaSeries entropy_by_derivative(const LambdaSeries& alpha0) {
  LambdaSeries out;
  out.coeffs.assign(alpha0.coeffs.size() + 1, Rational(0));
  for (std::size_t k = 1; k < alpha0.coeffs.size(); ++k) {
    // s * d/ds (c s^k) = k c s^k, integrated: k c s^{k+1} / (k+1)
    out.coeffs[k + 1] = alpha0.coeffs[k] * static_cast<long>(k) / static_cast<long>(k + 1);
  }
  return out;
}

FreeEntropy free_entropy(const Potential& v, const Rational& lambda, int K,
                         const ExpansionOptions& options) {
  const LambdaSeries alpha0 = alpha_series(0, v, v.poly(), K, options);
  FreeEntropy out;
  out.series = entropy_by_parts(alpha0);
  out.series_by_derivative = entropy_by_derivative(alpha0);
  out.value = out.series.evaluate(lambda);
  out.forms_agree = out.series == out.series_by_derivative;
  return out;
}

}  // namespace mme::master

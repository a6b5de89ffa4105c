#include "mme/expalg.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace mme::expalg {

SymVec::SymVec(std::vector<Entry> entries) {
  for (const auto& [s, v] : entries) add(s, v);
}

int SymVec::get(Symbol s) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const Entry& e, Symbol key) { return e.first < key; });
  return (it != entries_.end() && it->first == s) ? it->second : 0;
}

void SymVec::add(Symbol s, int delta) {
  if (delta == 0) return;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const Entry& e, Symbol key) { return e.first < key; });
  if (it != entries_.end() && it->first == s) {
    it->second += delta;
    if (it->second == 0) entries_.erase(it);
  } else {
    entries_.insert(it, {s, delta});
  }
}

void SymVec::set(Symbol s, int value) { add(s, value - get(s)); }

SymVec& SymVec::operator+=(const SymVec& other) {
  if (entries_.empty()) {
    entries_ = other.entries_;
    return *this;
  }
  std::vector<Entry> merged;
  merged.reserve(entries_.size() + other.entries_.size());
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == entries_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      const int v = a->second + b->second;
      if (v != 0) merged.emplace_back(a->first, v);
      ++a;
      ++b;
    }
  }
  entries_ = std::move(merged);
  return *this;
}

ExpPoly::ExpPoly(const Rational& c) {
  if (c != 0) terms_.emplace(Key{}, c);
}

ExpPoly ExpPoly::exponential(const HalfLinForm& expo, const Rational& c) {
  ExpPoly out;
  if (c != 0) out.terms_.emplace(Key{Powers{}, expo}, c);
  return out;
}

ExpPoly ExpPoly::variable(Symbol s) {
  ExpPoly out;
  Powers p;
  p.add(s, 1);
  out.terms_.emplace(Key{p, HalfLinForm{}}, Rational(1));
  return out;
}

std::vector<ExpTerm> ExpPoly::terms() const {
  std::vector<ExpTerm> out;
  out.reserve(terms_.size());
  for (const auto& [key, c] : terms_) out.push_back({c, key.first, key.second});
  return out;
}

bool ExpPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Key{});
}

Rational ExpPoly::constant_value() const {
  if (!is_constant()) {
    throw std::logic_error("ExpPoly is not constant: " + to_string(*this));
  }
  return terms_.empty() ? Rational(0) : terms_.begin()->second;
}

void ExpPoly::add_term(const Rational& c, const Powers& powers, const HalfLinForm& expo) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(Key{powers, expo}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

ExpPoly& ExpPoly::operator+=(const ExpPoly& other) {
  for (const auto& [key, c] : other.terms_) add_term(c, key.first, key.second);
  return *this;
}

ExpPoly& ExpPoly::operator-=(const ExpPoly& other) {
  for (const auto& [key, c] : other.terms_) add_term(-c, key.first, key.second);
  return *this;
}

ExpPoly& ExpPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, v] : terms_) v *= c;
  return *this;
}

ExpPoly& ExpPoly::scale_exp(const Rational& c, const HalfLinForm& expo) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  if (expo.empty()) return *this *= c;
  std::map<Key, Rational> shifted;
  for (auto& [key, v] : terms_) {
    shifted.emplace(Key{key.first, key.second + expo}, v * c);
  }
  terms_ = std::move(shifted);
  return *this;
}

ExpPoly operator*(const ExpPoly& a, const ExpPoly& b) {
  ExpPoly out;
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      out.add_term(ca * cb, ka.first + kb.first, ka.second + kb.second);
    }
  }
  return out;
}

std::string to_string(const ExpPoly& f) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : f.raw()) {
    if (!first) os << " + ";
    first = false;
    os << mme::to_string(c);
    for (const auto& [s, p] : key.first.entries()) {
      os << " * t" << s;
      if (p != 1) os << "^" << p;
    }
    if (!key.second.empty()) {
      os << " * exp(";
      bool first_entry = true;
      for (const auto& [s, a] : key.second.entries()) {
        if (!first_entry) os << " + ";
        first_entry = false;
        os << "(" << mme::to_string(ratio(a, 2)) << ")*t" << s;
      }
      os << ")";
    }
  }
  return os.str();
}

namespace {

// p! / (p - j)!
Rational falling(int p, int j) {
  Rational out(1);
  for (int q = p; q > p - j; --q) out *= q;
  return out;
}

Rational power(const Rational& base, int e) {
  Rational out(1);
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace

ExpPoly integrate_drop(const ExpPoly& f, Symbol v, Symbol upper) {
  if (v == upper) throw std::invalid_argument("integrate_drop: upper bound equals variable");
  ExpPoly out;
  for (const auto& [key, c] : f.raw()) {
    const int p = key.first.get(v);
    const int a2 = key.second.get(v);
    Powers rest_pow = key.first;
    rest_pow.set(v, 0);
    HalfLinForm rest_expo = key.second;
    rest_expo.set(v, 0);
    if (a2 == 0) {
      Powers pw = rest_pow;
      pw.add(upper, p + 1);
      out.add_term(c / (p + 1), pw, rest_expo);
      continue;
    }
    const Rational inv_a = ratio(2, a2);  // 1/a with a = a2/2
    HalfLinForm expo_at_upper = rest_expo;
    expo_at_upper.add(upper, a2);
    for (int j = 0; j <= p; ++j) {
      Powers pw = rest_pow;
      pw.add(upper, p - j);
      const Rational sign = (j % 2 == 0) ? 1 : -1;
      out.add_term(c * falling(p, j) * sign * power(inv_a, j + 1), pw, expo_at_upper);
    }
    const Rational sign = (p % 2 == 0) ? 1 : -1;
    out.add_term(-c * falling(p, p) * sign * power(inv_a, p + 1), rest_pow, rest_expo);
  }
  return out;
}

ExpPoly integrate_chain_tail(const ExpPoly& f, Symbol u, Symbol lower) {
  if (u == lower) throw std::invalid_argument("integrate_chain_tail: lower bound equals variable");
  ExpPoly out;
  for (const auto& [key, c] : f.raw()) {
    const int p = key.first.get(u);
    const int a2 = key.second.get(u);
    if (a2 >= 0) {
      throw DivergentIntegral("tail integral over t" + std::to_string(u) +
                              " diverges: term exponent " + mme::to_string(ratio(a2, 2)));
    }
    Powers rest_pow = key.first;
    rest_pow.set(u, 0);
    HalfLinForm rest_expo = key.second;
    rest_expo.set(u, 0);
    const Rational inv_a = ratio(2, a2);
    if (lower == 0) {
      const Rational sign = (p % 2 == 0) ? -1 : 1;  // (-1)^{p+1}
      out.add_term(c * falling(p, p) * sign * power(inv_a, p + 1), rest_pow, rest_expo);
      continue;
    }
    HalfLinForm expo_at_lower = rest_expo;
    expo_at_lower.add(lower, a2);
    for (int j = 0; j <= p; ++j) {
      Powers pw = rest_pow;
      pw.add(lower, p - j);
      const Rational sign = (j % 2 == 0) ? -1 : 1;  // (-1)^{j+1}
      out.add_term(c * falling(p, j) * sign * power(inv_a, j + 1), pw, expo_at_lower);
    }
  }
  return out;
}

void DomainSpec::validate() const {
  std::set<Symbol> seen;
  for (Symbol s : chain) {
    if (s <= 0 || !seen.insert(s).second) {
      throw std::invalid_argument("DomainSpec: invalid or repeated chain symbol t" +
                                  std::to_string(s));
    }
  }
  for (const auto& d : drops) {
    if (d.symbol <= 0 || !seen.insert(d.symbol).second) {
      throw std::invalid_argument("DomainSpec: invalid or repeated drop symbol t" +
                                  std::to_string(d.symbol));
    }
    if (d.anchor >= chain.size()) {
      throw std::invalid_argument("DomainSpec: drop anchor out of range");
    }
  }
}

Rational integrate_domain(const ExpPoly& f, const DomainSpec& domain) {
  domain.validate();
  std::set<Symbol> known(domain.chain.begin(), domain.chain.end());
  for (const auto& d : domain.drops) known.insert(d.symbol);
  for (const auto& [key, c] : f.raw()) {
    for (const auto& [s, p] : key.first.entries()) {
      if (!known.count(s)) throw std::invalid_argument("integrand uses t" + std::to_string(s) +
                                                       " outside the domain");
    }
    for (const auto& [s, a] : key.second.entries()) {
      if (!known.count(s)) throw std::invalid_argument("integrand uses t" + std::to_string(s) +
                                                       " outside the domain");
    }
  }
  ExpPoly g = f;
  for (const auto& d : domain.drops) g = integrate_drop(g, d.symbol, domain.chain[d.anchor]);
  for (std::size_t i = domain.chain.size(); i-- > 0;) {
    g = integrate_chain_tail(g, domain.chain[i], i > 0 ? domain.chain[i - 1] : 0);
  }
  return g.constant_value();
}

double eval_numeric(const ExpPoly& f, const std::map<Symbol, double>& assignment) {
  auto value_of = [&](Symbol s) {
    auto it = assignment.find(s);
    if (it == assignment.end()) {
      throw std::invalid_argument("eval_numeric: t" + std::to_string(s) + " is unassigned");
    }
    return it->second;
  };
  double total = 0.0;
  for (const auto& [key, c] : f.raw()) {
    double term = to_double(c);
    for (const auto& [s, p] : key.first.entries()) term *= std::pow(value_of(s), p);
    double expo = 0.0;
    for (const auto& [s, a] : key.second.entries()) expo += 0.5 * a * value_of(s);
    total += term * std::exp(expo);
  }
  return total;
}

namespace {

// Calls visit(tuple) for every (n_1..n_k) with 1 <= n_i <= i.
template <typename Visit>
void for_each_tuple(int k, Visit&& visit) {
  std::vector<int> tuple(static_cast<std::size_t>(k), 1);
  while (true) {
    visit(tuple);
    int i = k - 1;
    while (i >= 0 && tuple[static_cast<std::size_t>(i)] == i + 1) {
      tuple[static_cast<std::size_t>(i)] = 1;
      --i;
    }
    if (i < 0) return;
    ++tuple[static_cast<std::size_t>(i)];
  }
}

Rational tuple_weight(const std::vector<int>& tuple) {
  const int k = static_cast<int>(tuple.size());
  Rational w(1);
  for (int j = 1; j <= k; ++j) {
    int count = 0;
    for (int i = 1; i <= k; ++i) {
      if (tuple[static_cast<std::size_t>(i - 1)] <= j && j <= i) ++count;
    }
    w /= count;
  }
  return w;
}

}  // namespace

Rational i_k_integral(int k) {
  if (k < 1) throw std::invalid_argument("i_k_integral: k must be >= 1");
  ExpPoly integrand;
  for_each_tuple(k, [&](const std::vector<int>& tuple) {
    HalfLinForm expo;
    for (int i = 1; i <= k; ++i) {
      expo.add(i, -2);
      const int lower = tuple[static_cast<std::size_t>(i - 1)] - 1;
      if (lower > 0) expo.add(lower, 2);
    }
    integrand.add_term(1, Powers{}, expo);
  });
  DomainSpec domain;
  for (int i = 1; i <= k; ++i) domain.chain.push_back(i);
  return integrate_domain(integrand, domain);
}

Rational i_k_sum(int k) {
  if (k < 1) throw std::invalid_argument("i_k_sum: k must be >= 1");
  Rational total(0);
  for_each_tuple(k, [&](const std::vector<int>& tuple) { total += tuple_weight(tuple); });
  return total;
}

Rational i_k_restricted_sum(int k, int p) {
  if (k < 1) throw std::invalid_argument("i_k_restricted_sum: k must be >= 1");
  Rational total(0);
  for_each_tuple(k, [&](const std::vector<int>& tuple) {
    std::map<int, int> counts;
    for (int v : tuple) {
      if (++counts[v] > p) return;
    }
    total += tuple_weight(tuple);
  });
  return total;
}

}  // namespace mme::expalg

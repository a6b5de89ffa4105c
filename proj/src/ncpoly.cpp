#include "mme/ncpoly.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <sstream>

namespace mme::nc {

namespace {

class LabelTable {
 public:
  LabelId intern(const VarLabel& label) {
    {
      std::shared_lock lock(mutex_);
      auto it = ids_.find(label);
      if (it != ids_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    auto [it, inserted] = ids_.try_emplace(label, static_cast<LabelId>(labels_.size()));
    if (inserted) labels_.push_back(label);
    return it->second;
  }

  const VarLabel& get(LabelId id) const {
    std::shared_lock lock(mutex_);
    return labels_.at(id);
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<VarLabel, LabelId> ids_;
  std::deque<VarLabel> labels_;  // stable references
};

LabelTable& table() {
  static LabelTable instance;
  return instance;
}

}  // namespace

LabelId intern(const VarLabel& label) {
  if (label.color < 1) throw std::invalid_argument("label color must be positive");
  for (int v : label.index) {
    if (v <= 0) throw std::invalid_argument("index list entries must be positive");
  }
  return table().intern(label);
}

const VarLabel& label_of(LabelId id) { return table().get(id); }

std::string to_string(const VarLabel& label) {
  std::string out = "X" + std::to_string(label.color);
  if (!label.index.empty()) {
    out += "[";
    for (std::size_t k = 0; k < label.index.size(); ++k) {
      if (k) out += ",";
      out += std::to_string(label.index[k]);
    }
    out += "]";
  }
  return out;
}

std::string label_text(LabelId id) { return to_string(label_of(id)); }

std::string monomial_text(const Monomial& m) {
  if (m.empty()) return "1";
  std::string out;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (k) out += "*";
    out += label_text(m[k]);
  }
  return out;
}

NCPoly NCPoly::unit(const ExpPoly& c) { return monomial({}, c); }

NCPoly NCPoly::variable(LabelId label, const ExpPoly& c) { return monomial({label}, c); }

NCPoly NCPoly::monomial(Monomial word, const ExpPoly& c) {
  NCPoly out;
  out.add_term(word, c);
  return out;
}

void NCPoly::add_term(const Monomial& word, const ExpPoly& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(word, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void NCPoly::add_term(Monomial&& word, ExpPoly&& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(word);
  if (it == terms_.end()) {
    terms_.emplace(std::move(word), std::move(c));
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

ExpPoly NCPoly::coefficient(const Monomial& word) const {
  auto it = terms_.find(word);
  return it == terms_.end() ? ExpPoly() : it->second;
}

NCPoly& NCPoly::operator+=(const NCPoly& other) {
  for (const auto& [w, c] : other.terms_) add_term(w, c);
  return *this;
}

NCPoly& NCPoly::operator-=(const NCPoly& other) {
  for (const auto& [w, c] : other.terms_) add_term(w, -c);
  return *this;
}

NCPoly& NCPoly::operator*=(const ExpPoly& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  std::map<Monomial, ExpPoly> scaled;
  for (auto& [w, v] : terms_) {
    ExpPoly prod = v * c;
    if (!prod.is_zero()) scaled.emplace(w, std::move(prod));
  }
  terms_ = std::move(scaled);
  return *this;
}

NCPoly operator*(const NCPoly& a, const NCPoly& b) {
  NCPoly out;
  for (const auto& [wa, ca] : a.terms_) {
    for (const auto& [wb, cb] : b.terms_) {
      Monomial w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      out.add_term(std::move(w), ca * cb);
    }
  }
  return out;
}

namespace {

std::string coefficient_text(const ExpPoly& c) {
  const std::string text = expalg::to_string(c);
  return c.size() > 1 ? "(" + text + ")" : text;
}

}  // namespace

std::string to_string(const NCPoly& p) {
  if (p.is_zero()) return "0";
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& [w, c] : p.terms()) rows.emplace_back(monomial_text(w), coefficient_text(c));
  std::sort(rows.begin(), rows.end());
  std::string out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k) out += " + ";
    out += rows[k].second + " * " + rows[k].first;
  }
  return out;
}

NCPoly reversed(const NCPoly& p) {
  NCPoly out;
  for (const auto& [w, c] : p.terms()) out.add_term(Monomial(w.rbegin(), w.rend()), c);
  return out;
}

void Tensor::add_term(const Monomial& left, const Monomial& right, const ExpPoly& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(Key{left, right}, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Tensor& Tensor::operator+=(const Tensor& other) {
  for (const auto& [k, c] : other.terms_) add_term(k.first, k.second, c);
  return *this;
}

Tensor operator*(const Tensor& a, const Tensor& b) {
  Tensor out;
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      Monomial left = ka.first;
      left.insert(left.end(), kb.first.begin(), kb.first.end());
      Monomial right = ka.second;
      right.insert(right.end(), kb.second.begin(), kb.second.end());
      out.add_term(left, right, ca * cb);
    }
  }
  return out;
}

Tensor Tensor::simple(const NCPoly& left, const NCPoly& right) {
  Tensor out;
  for (const auto& [wl, cl] : left.terms()) {
    for (const auto& [wr, cr] : right.terms()) out.add_term(wl, wr, cl * cr);
  }
  return out;
}

std::string to_string(const Tensor& t) {
  if (t.is_zero()) return "0";
  std::vector<std::string> rows;
  for (const auto& [k, c] : t.terms()) {
    rows.push_back(coefficient_text(c) + " * " + monomial_text(k.first) + " (x) " +
                   monomial_text(k.second));
  }
  std::sort(rows.begin(), rows.end());
  std::string out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k) out += " + ";
    out += rows[k];
  }
  return out;
}

Tensor partial(const NCPoly& p, LabelId var) {
  const int color = label_of(var).color;
  return partial_weighted(p, color, [&](LabelId id) -> std::optional<ExpPoly> {
    if (id == var) return ExpPoly(1);
    return std::nullopt;
  });
}

Tensor partial_level(const NCPoly& p, int color, int level, int n) {
  return partial_weighted(p, color, [&](LabelId id) -> std::optional<ExpPoly> {
    if (n - static_cast<int>(label_of(id).index.size()) == level) return ExpPoly(1);
    return std::nullopt;
  });
}

Tensor partial_color(const NCPoly& p, int color) {
  return partial_weighted(p, color, [](LabelId) -> std::optional<ExpPoly> { return ExpPoly(1); });
}

NCPoly multiply_swapped(const Tensor& t) {
  NCPoly out;
  for (const auto& [k, c] : t.terms()) {
    Monomial w = k.second;
    w.insert(w.end(), k.first.begin(), k.first.end());
    out.add_term(std::move(w), ExpPoly(c));
  }
  return out;
}

NCPoly cyclic_D(const NCPoly& p, int color, int level, int n) {
  return multiply_swapped(partial_level(p, color, level, n));
}

NCPoly cyclic_D(const NCPoly& p, int color) { return multiply_swapped(partial_color(p, color)); }

NCPoly hash_op(const Tensor& t, const NCPoly& c) {
  NCPoly out;
  for (const auto& [k, coef] : t.terms()) {
    for (const auto& [w, cw] : c.terms()) {
      Monomial word = k.first;
      word.insert(word.end(), w.begin(), w.end());
      word.insert(word.end(), k.second.begin(), k.second.end());
      out.add_term(std::move(word), coef * cw);
    }
  }
  return out;
}

int deg(const NCPoly& p) {
  int out = 0;
  for (const auto& [w, c] : p.terms()) out = std::max(out, static_cast<int>(w.size()));
  return out;
}

int deg_level(const NCPoly& p, int level, int n) {
  int out = 0;
  for (const auto& [w, c] : p.terms()) {
    int count = 0;
    for (LabelId id : w) {
      if (n - static_cast<int>(label_of(id).index.size()) == level) ++count;
    }
    out = std::max(out, count);
  }
  return out;
}

std::size_t nb(const NCPoly& p) { return p.size(); }

double c_max(const NCPoly& p, const std::map<expalg::Symbol, double>& times) {
  double out = 0.0;
  for (const auto& [w, c] : p.terms()) out = std::max(out, std::abs(expalg::eval_numeric(c, times)));
  return out;
}

// ---------------------------------------------------------------------------

History::History(std::vector<HistoryStep> steps) {
  for (const auto& step : steps) *this = with(step);
}

History History::with(HistoryStep step) const {
  History out = *this;
  out.steps_.push_back(step);
  switch (step.kind) {
    case HistoryStep::Kind::G:
      out.n_ = n_ + 1;
      out.c_ = c_ + 1;
      break;
    case HistoryStep::Kind::F:
      out.n_ = n_ + 2;
      out.c_ = 6 * c_ + 6;
      break;
    case HistoryStep::Kind::Fj: {
      if (step.j < 1 || step.j > n_ + 1) {
        throw std::invalid_argument("F_j step with j outside [1, n+1]");
      }
      out.n_ = n_ + 2;
      // Largest entry comes from the tilde copy of F_j^2.
      out.c_ = step.j == n_ + 1 ? 6 * c_ + 6 : 6 * c_ + 4;
      break;
    }
  }
  return out;
}

namespace {

void apply_step(std::set<IndexList>& universe, int n, int c, const HistoryStep& step) {
  std::set<IndexList> next;
  auto add_f = [&](int s) {
    for (auto kind : {LabelMap::Kind::F1, LabelMap::Kind::F2, LabelMap::Kind::F1Tilde,
                      LabelMap::Kind::F2Tilde}) {
      const LabelMap map{kind, s, n, c};
      for (const auto& idx : universe) next.insert(map.apply(idx));
    }
  };
  switch (step.kind) {
    case HistoryStep::Kind::G: {
      const LabelMap map{LabelMap::Kind::GPlus, 0, n, c};
      for (const auto& idx : universe) next.insert(map.apply(idx));
      next.insert(IndexList{});
      break;
    }
    case HistoryStep::Kind::F:
      for (int s = 1; s <= n + 1; ++s) add_f(s);
      break;
    case HistoryStep::Kind::Fj:
      add_f(step.j);
      break;
  }
  universe = std::move(next);
}

}  // namespace

std::set<IndexList> j_universe(const History& h) {
  std::set<IndexList> universe{IndexList{}};
  History prefix;
  for (const auto& step : h.steps()) {
    apply_step(universe, prefix.n(), prefix.c(), step);
    prefix = prefix.with(step);
  }
  return universe;
}

std::set<IndexList> j_level(const History& h, int level) {
  std::set<IndexList> out;
  for (const auto& idx : j_universe(h)) {
    if (h.n() - static_cast<int>(idx.size()) == level) out.insert(idx);
  }
  return out;
}

LabelMap LabelMap::g_plus(const History& source) {
  return LabelMap{Kind::GPlus, 0, source.n(), source.c()};
}

LabelMap LabelMap::f(Kind kind, int s, const History& source) {
  if (kind == Kind::GPlus) throw std::invalid_argument("LabelMap::f expects an F kind");
  if (s < 1 || s > source.n() + 1) throw std::invalid_argument("F map rank outside [1, n+1]");
  return LabelMap{kind, s, source.n(), source.c()};
}

IndexList LabelMap::apply(const IndexList& index) const {
  const int len = static_cast<int>(index.size());
  if (len > n) throw UnknownLabel("index list longer than the universe allows");
  if (kind == Kind::GPlus) {
    IndexList out = index;
    out.push_back(c + 1);
    return out;
  }
  const bool second = kind == Kind::F2 || kind == Kind::F2Tilde;
  const bool tilde = kind == Kind::F1Tilde || kind == Kind::F2Tilde;
  const int shift = second ? 2 * c : c;
  const int first_pos = n - len + 1;  // position of index[0]
  IndexList out;
  out.reserve(index.size() + 2);
  if (s == n + 1) {
    for (int v : index) out.push_back(v + shift);
    out.push_back(second ? 3 * c + 3 : 3 * c + 2);
  } else if (s >= first_pos) {
    for (int pos = first_pos; pos < s; ++pos) out.push_back(index[pos - first_pos] + shift);
    out.push_back(index[s - first_pos] + shift);
    for (int pos = s; pos <= n; ++pos) out.push_back(index[pos - first_pos]);
  } else {
    out = index;
  }
  out.push_back(3 * c + 1);
  if (tilde) {
    for (int& v : out) v += 3 * c + 3;
  }
  return out;
}

LabelId LabelMap::apply(LabelId label) const {
  const VarLabel& lab = label_of(label);
  return intern(VarLabel{lab.color, apply(lab.index)});
}

Monomial relabel(const Monomial& m, const LabelMap& map) {
  Monomial out;
  out.reserve(m.size());
  for (LabelId id : m) out.push_back(map.apply(id));
  return out;
}

NCPoly relabel(const NCPoly& p, const LabelMap& map, const std::set<IndexList>* universe) {
  NCPoly out;
  for (const auto& [w, c] : p.terms()) {
    if (universe) {
      for (LabelId id : w) {
        if (!universe->count(label_of(id).index)) {
          throw UnknownLabel("label " + label_text(id) + " is not in the source universe");
        }
      }
    }
    out.add_term(relabel(w, map), c);
  }
  return out;
}

}  // namespace mme::nc

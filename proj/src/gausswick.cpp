#include "mme/gausswick.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace mme::gauss {

Star star_from_word(const std::string& colors) {
  Star s;
  for (char ch : colors) {
    if (ch < '1' || ch > '9') throw std::invalid_argument("star colors must be digits 1-9");
    s.colors.push_back(ch - '0');
  }
  return s;
}

std::string to_string(const Star& s) {
  std::string out;
  for (std::size_t k = 0; k < s.colors.size(); ++k) {
    if (k) out += '*';
    out += "X" + std::to_string(s.colors[k]);
  }
  return out;
}

// ---------------------------------------------------------------- LaurentN

LaurentN::LaurentN(const Rational& c) { add(0, c); }

LaurentN LaurentN::monomial(int exponent, const Rational& c) {
  LaurentN out;
  out.add(exponent, c);
  return out;
}

Rational LaurentN::coefficient(int exponent) const {
  auto it = terms_.find(exponent);
  return it == terms_.end() ? Rational(0) : it->second;
}

void LaurentN::add(int exponent, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(exponent, c);
  if (inserted) return;
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

LaurentN& LaurentN::operator+=(const LaurentN& o) {
  for (const auto& [e, c] : o.terms_) add(e, c);
  return *this;
}

LaurentN& LaurentN::operator-=(const LaurentN& o) {
  for (const auto& [e, c] : o.terms_) add(e, -c);
  return *this;
}

LaurentN& LaurentN::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

LaurentN LaurentN::shifted(int by) const {
  LaurentN out;
  for (const auto& [e, c] : terms_) out.terms_.emplace(e + by, c);
  return out;
}

LaurentN operator*(const LaurentN& a, const LaurentN& b) {
  LaurentN out;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) out.add(ea + eb, ca * cb);
  }
  return out;
}

std::string to_string(const LaurentN& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    Rational c = it->second;
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    c = abs(c);
    if (it->first == 0) {
      os << mme::to_string(c);
      continue;
    }
    if (c != 1) os << mme::to_string(c) << "*";
    os << "N";
    if (it->first != 1) os << "^" << it->first;
  }
  return os.str();
}

// ------------------------------------------------------------- enumeration

namespace {

struct Layout {
  std::vector<int> color;
  std::vector<int> star;
  std::vector<int> next;  // next half-edge around the same star
  int stars = 0;
};

Layout make_layout(const std::vector<Star>& stars) {
  Layout l;
  l.stars = static_cast<int>(stars.size());
  for (int v = 0; v < l.stars; ++v) {
    const int base = static_cast<int>(l.color.size());
    const int deg = stars[static_cast<std::size_t>(v)].degree();
    if (deg < 1) throw std::invalid_argument("a star needs at least one half-edge");
    for (int k = 0; k < deg; ++k) {
      l.color.push_back(stars[static_cast<std::size_t>(v)].colors[static_cast<std::size_t>(k)]);
      l.star.push_back(v);
      l.next.push_back(base + (k + 1) % deg);
    }
  }
  return l;
}

bool color_feasible(const Layout& l) {
  std::map<int, int> count;
  for (int c : l.color) ++count[c];
  return std::all_of(count.begin(), count.end(), [](const auto& e) { return e.second % 2 == 0; });
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    x = parent[static_cast<std::size_t>(x)];
  }
  return x;
}

DiagramStats stats_of(const Layout& l, const std::vector<int>& match) {
  const int h = static_cast<int>(match.size());
  DiagramStats s;
  s.vertices = l.stars;
  s.edges = h / 2;
  std::vector<char> seen(static_cast<std::size_t>(h), 0);
  for (int start = 0; start < h; ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    ++s.faces;
    int x = start;
    while (!seen[static_cast<std::size_t>(x)]) {
      seen[static_cast<std::size_t>(x)] = 1;
      x = l.next[static_cast<std::size_t>(match[static_cast<std::size_t>(x)])];
    }
  }
  if (l.stars <= 1) {
    s.components = l.stars;
    return s;
  }
  std::vector<int> parent(static_cast<std::size_t>(l.stars));
  std::iota(parent.begin(), parent.end(), 0);
  s.components = l.stars;
  for (int x = 0; x < h; ++x) {
    const int a = find_root(parent, l.star[static_cast<std::size_t>(x)]);
    const int b = find_root(parent, l.star[static_cast<std::size_t>(match[static_cast<std::size_t>(x)])]);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --s.components;
    }
  }
  return s;
}

template <class Visit>
void enumerate(const Layout& l, std::vector<int>& match, Visit& visit) {
  const int h = static_cast<int>(match.size());
  int first = 0;
  while (first < h && match[static_cast<std::size_t>(first)] >= 0) ++first;
  if (first == h) {
    visit(stats_of(l, match));
    return;
  }
  for (int other = first + 1; other < h; ++other) {
    if (match[static_cast<std::size_t>(other)] >= 0) continue;
    if (l.color[static_cast<std::size_t>(other)] != l.color[static_cast<std::size_t>(first)]) continue;
    match[static_cast<std::size_t>(first)] = other;
    match[static_cast<std::size_t>(other)] = first;
    enumerate(l, match, visit);
    match[static_cast<std::size_t>(first)] = -1;
    match[static_cast<std::size_t>(other)] = -1;
  }
}

void check_budget(const Layout& l, const WickOptions& options) {
  if (static_cast<int>(l.color.size()) > options.max_half_edges) {
    throw master::BudgetExceeded("pairing enumeration over " + std::to_string(l.color.size()) +
                                 " half-edges exceeds the cap of " +
                                 std::to_string(options.max_half_edges));
  }
}

// Runs one accumulator per partner of half-edge 0 and merges the results.
template <class Acc, class Visit>
Acc enumerate_parallel(const Layout& l, const WickOptions& options, Visit visit) {
  const int h = static_cast<int>(l.color.size());
  Acc total{};
  if (h == 0) {
    std::vector<int> match;
    visit(total, stats_of(l, match));
    return total;
  }
  auto branch = [&](int partner) {
    Acc acc{};
    std::vector<int> match(static_cast<std::size_t>(h), -1);
    match[0] = partner;
    match[static_cast<std::size_t>(partner)] = 0;
    auto leaf = [&](const DiagramStats& s) { visit(acc, s); };
    enumerate(l, match, leaf);
    return acc;
  };
  std::vector<int> partners;
  for (int other = 1; other < h; ++other) {
    if (l.color[static_cast<std::size_t>(other)] == l.color[0]) partners.push_back(other);
  }
  if (options.threads <= 1 || partners.size() < 2) {
    for (int p : partners) total.merge(branch(p));
    return total;
  }
  std::vector<std::future<Acc>> tasks;
  for (int p : partners) tasks.push_back(std::async(std::launch::async, branch, p));
  for (auto& t : tasks) total.merge(t.get());
  return total;
}

struct ExponentCounts {
  std::map<int, long long> count;
  void merge(const ExponentCounts& o) {
    for (const auto& [e, c] : o.count) count[e] += c;
  }
};

struct GenusCounts {
  std::map<int, long long> count;  // connected diagrams only
  void merge(const GenusCounts& o) {
    for (const auto& [g, c] : o.count) count[g] += c;
  }
};

GenusCounts connected_genus_counts(const std::vector<Star>& stars, const WickOptions& options) {
  const Layout l = make_layout(stars);
  check_budget(l, options);
  if (!color_feasible(l)) return {};
  return enumerate_parallel<GenusCounts>(l, options, [](GenusCounts& acc, const DiagramStats& s) {
    if (s.components == 1) ++acc.count[s.genus()];
  });
}

Rational power(const Rational& base, int e) {
  Rational out(1);
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace

void for_each_pairing(const std::vector<Star>& stars,
                      const std::function<void(const DiagramStats&)>& visit,
                      const WickOptions& options) {
  const Layout l = make_layout(stars);
  check_budget(l, options);
  if (!color_feasible(l)) return;
  std::vector<int> match(l.color.size(), -1);
  auto leaf = [&](const DiagramStats& s) { visit(s); };
  enumerate(l, match, leaf);
}

int faces(const PairingDiagram& d) {
  const Layout l = make_layout(d.stars);
  std::vector<int> match(l.color.size(), -1);
  for (auto [a, b] : d.matching) {
    match.at(static_cast<std::size_t>(a)) = b;
    match.at(static_cast<std::size_t>(b)) = a;
  }
  if (std::count(match.begin(), match.end(), -1) != 0) {
    throw std::invalid_argument("matching does not cover every half-edge");
  }
  return stats_of(l, match).faces;
}

int components(const PairingDiagram& d) {
  const Layout l = make_layout(d.stars);
  std::vector<int> match(l.color.size(), -1);
  for (auto [a, b] : d.matching) {
    match.at(static_cast<std::size_t>(a)) = b;
    match.at(static_cast<std::size_t>(b)) = a;
  }
  return stats_of(l, match).components;
}

int genus(const PairingDiagram& d) {
  const Layout l = make_layout(d.stars);
  std::vector<int> match(l.color.size(), -1);
  for (auto [a, b] : d.matching) {
    match.at(static_cast<std::size_t>(a)) = b;
    match.at(static_cast<std::size_t>(b)) = a;
  }
  return stats_of(l, match).genus();
}

LaurentN gue_mixed_moment(const std::vector<Star>& stars, const WickOptions& options) {
  const Layout l = make_layout(stars);
  check_budget(l, options);
  if (!color_feasible(l)) return {};
  const ExponentCounts counts = enumerate_parallel<ExponentCounts>(
      l, options,
      [](ExponentCounts& acc, const DiagramStats& s) { ++acc.count[s.faces - s.edges]; });
  LaurentN out;
  for (const auto& [e, c] : counts.count) out.add(e, Rational(static_cast<long>(c)));
  return out;
}

std::vector<std::vector<int>> multisets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n - 1) {
      cur[static_cast<std::size_t>(pos)] = left;
      out.push_back(cur);
      return;
    }
    for (int m = left; m >= 0; --m) {
      cur[static_cast<std::size_t>(pos)] = m;
      rec(pos + 1, left - m);
    }
  };
  if (n == 0) {
    if (k == 0) out.emplace_back();
    return out;
  }
  rec(0, k);
  return out;
}

std::vector<std::pair<Rational, Star>> potential_stars(const master::Potential& v) {
  std::vector<std::pair<Rational, Star>> out;
  for (auto& [c, colors] : v.monomials()) {
    if (colors.empty()) continue;  // constants cancel in the ratio
    out.emplace_back(c, Star{colors});
  }
  return out;
}

namespace {

std::vector<Star> expand_multiset(const std::vector<std::pair<Rational, Star>>& kinds,
                                  const std::vector<int>& m) {
  std::vector<Star> out;
  for (std::size_t j = 0; j < m.size(); ++j) {
    for (int r = 0; r < m[j]; ++r) out.push_back(kinds[j].second);
  }
  return out;
}

// prod_j c_j^{m_j} / m_j!
Rational multiset_weight(const std::vector<std::pair<Rational, Star>>& kinds,
                         const std::vector<int>& m, bool negate) {
  Rational w(1);
  for (std::size_t j = 0; j < m.size(); ++j) {
    const Rational c = negate ? Rational(-kinds[j].first) : kinds[j].first;
    w *= power(c, m[j]) / factorial(static_cast<unsigned>(m[j]));
  }
  return w;
}

}  // namespace

std::vector<LaurentN> ratio_series(const Star& p, const master::Potential& v, int K,
                                   const WickOptions& options) {
  if (K < 0) throw std::invalid_argument("ratio_series: negative order");
  const auto kinds = potential_stars(v);
  std::vector<LaurentN> num(static_cast<std::size_t>(K + 1));
  std::vector<LaurentN> den(static_cast<std::size_t>(K + 1));
  for (int k = 0; k <= K; ++k) {
    for (const auto& m : multisets(static_cast<int>(kinds.size()), k)) {
      const Rational w = multiset_weight(kinds, m, true);
      std::vector<Star> vertices = expand_multiset(kinds, m);
      LaurentN d = gue_mixed_moment(vertices, options);
      d *= w;
      den[static_cast<std::size_t>(k)] += d.shifted(k);
      vertices.insert(vertices.begin(), p);
      LaurentN n = gue_mixed_moment(vertices, options);
      n *= w;
      num[static_cast<std::size_t>(k)] += n.shifted(k - 1);
    }
  }
  if (den[0] != LaurentN(Rational(1))) throw std::logic_error("ratio_series: denominator must start at 1");
  std::vector<LaurentN> out(static_cast<std::size_t>(K + 1));
  for (int k = 0; k <= K; ++k) {
    LaurentN r = num[static_cast<std::size_t>(k)];
    for (int j = 1; j <= k; ++j) r -= den[static_cast<std::size_t>(j)] * out[static_cast<std::size_t>(k - j)];
    for (const auto& [e, c] : r.terms()) {
      if (e > 0 || e % 2 != 0) {
        throw OddPowerDetected("lambda^" + std::to_string(k) + " coefficient contains N^" +
                               std::to_string(e) + ": " + to_string(r));
      }
    }
    out[static_cast<std::size_t>(k)] = std::move(r);
  }
  return out;
}

master::LambdaSeries genus_coefficient(const std::vector<LaurentN>& series, int g) {
  master::LambdaSeries out;
  for (const auto& c : series) out.coeffs.push_back(c.coefficient(-2 * g));
  return out;
}

BigInt map_count(int g, const std::vector<Star>& vertices, const Star& root,
                 const WickOptions& options) {
  std::vector<Star> stars{root};
  stars.insert(stars.end(), vertices.begin(), vertices.end());
  const GenusCounts counts = connected_genus_counts(stars, options);
  auto it = counts.count.find(g);
  return it == counts.count.end() ? BigInt(0) : BigInt(static_cast<long>(it->second));
}

std::vector<MapRow> map_count_table(const master::Potential& v, const Star& root, int g_max,
                                    int K, const WickOptions& options) {
  const auto kinds = potential_stars(v);
  std::vector<MapRow> rows;
  for (int k = 0; k <= K; ++k) {
    for (const auto& m : multisets(static_cast<int>(kinds.size()), k)) {
      std::vector<Star> vertices = expand_multiset(kinds, m);
      std::vector<Star> stars{root};
      stars.insert(stars.end(), vertices.begin(), vertices.end());
      const GenusCounts counts = connected_genus_counts(stars, options);
      for (int g = 0; g <= g_max; ++g) {
        auto it = counts.count.find(g);
        const long c = it == counts.count.end() ? 0 : static_cast<long>(it->second);
        rows.push_back(MapRow{g, vertices, BigInt(c)});
      }
    }
  }
  return rows;
}

namespace {

std::string vertices_text(const std::vector<Star>& vs) {
  std::string out;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    if (k) out += ' ';
    out += to_string(vs[k]);
  }
  return out;
}

}  // namespace

std::string map_table_csv(const std::vector<MapRow>& rows) {
  std::ostringstream os;
  os << "genus,vertices,count\n";
  for (const auto& r : rows) os << r.genus << ",\"" << vertices_text(r.vertices) << "\"," << r.count.get_str() << "\n";
  return os.str();
}

std::string map_table_json(const std::vector<MapRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& s : r.vertices) vs.push_back(to_string(s));
    arr.push_back({{"genus", r.genus}, {"vertices", vs}, {"count", r.count.get_str()}});
  }
  return arr.dump();
}

CorollaryReport corollary13_check(const master::Potential& v, const Star& root, int g, int K,
                                  const WickOptions& options) {
  const auto kinds = potential_stars(v);
  const master::LambdaSeries oracle = genus_coefficient(ratio_series(root, v, K, options), g);
  CorollaryReport report;
  for (int k = 0; k <= K; ++k) {
    Rational maps(0);
    for (const auto& m : multisets(static_cast<int>(kinds.size()), k)) {
      const BigInt count = map_count(g, expand_multiset(kinds, m), root, options);
      if (count == 0) continue;
      maps += multiset_weight(kinds, m, true) * Rational(count);
    }
    const Rational lhs = oracle.coeffs[static_cast<std::size_t>(k)];
    report.orders.emplace_back(lhs, maps);
    if (lhs != maps && report.ok) {
      report.ok = false;
      std::ostringstream os;
      os << "lambda^" << k << ": oracle " << mme::to_string(lhs) << " vs maps " << mme::to_string(maps);
      if (maps != 0) os << " (factor " << mme::to_string(lhs / maps) << ")";
      report.message = os.str();
    }
  }
  return report;
}

}  // namespace mme::gauss

#include "mme/freewick.hpp"

#include <string>

namespace mme::freewick {

namespace {

void pairings_rec(std::vector<int>& open, int next, int p, Pairing& current,
                  std::vector<Pairing>& out) {
  if (next > p) {
    if (open.empty()) out.push_back(current);
    return;
  }
  // Remaining points must be able to close every open one.
  if (static_cast<int>(open.size()) > p - next + 1) return;
  // Close the most recent open point (the only non-crossing choice).
  if (!open.empty()) {
    const int top = open.back();
    open.pop_back();
    current.emplace_back(top, next);
    pairings_rec(open, next + 1, p, current, out);
    current.pop_back();
    open.push_back(top);
  }
  open.push_back(next);
  pairings_rec(open, next + 1, p, current, out);
  open.pop_back();
}

}  // namespace

std::vector<Pairing> noncrossing_pairings(int p, int max_points) {
  if (p < 0 || p % 2 != 0) throw OddLength("non-crossing pairings need an even number of points");
  if (p > max_points) {
    throw std::invalid_argument("pairing enumeration capped at " + std::to_string(max_points) +
                                " points");
  }
  std::vector<Pairing> out;
  std::vector<int> open;
  Pairing current;
  pairings_rec(open, 1, p, current, out);
  return out;
}

expalg::HalfLinForm TimeContext::rank_form(int rank, int doubled_coeff) const {
  expalg::HalfLinForm out;
  if (rank < 0 || rank > n()) throw std::out_of_range("time rank out of range");
  if (rank > 0) out.add(order[static_cast<std::size_t>(rank - 1)], doubled_coeff);
  return out;
}

Interpolant interpolant(LabelId label, const TimeContext& ctx) {
  const auto& lab = nc::label_of(label);
  const int n = ctx.n();
  const int len = static_cast<int>(lab.index.size());
  if (len > n) {
    throw nc::UnknownLabel("label " + nc::label_text(label) + " needs more than " +
                           std::to_string(n) + " times");
  }
  Interpolant out;
  const int first = n - len + 1;
  out.prefactor_rank = first - 1;
  for (int k = 0; k < len; ++k) {
    out.components.emplace_back(GeneratorId{lab.color, lab.index[static_cast<std::size_t>(k)]},
                                first + k);
  }
  out.components.emplace_back(GeneratorId{lab.color, 0}, n + 1);
  return out;
}

namespace {

// e^{-t~_{l-1}} - e^{-t~_l} for l <= n, e^{-t~_n} for l = n + 1, times e^{base}.
ExpPoly step_weight(int position, const expalg::HalfLinForm& base, const TimeContext& ctx) {
  const int n = ctx.n();
  if (position == n + 1) return ExpPoly::exponential(base + ctx.rank_form(n, -2));
  ExpPoly out = ExpPoly::exponential(base + ctx.rank_form(position - 1, -2));
  out -= ExpPoly::exponential(base + ctx.rank_form(position, -2));
  return out;
}

}  // namespace

ExpPoly squared_weight(const Interpolant& x, int position, const TimeContext& ctx) {
  return step_weight(position, ctx.rank_form(x.prefactor_rank, 2), ctx);
}

ExpPoly covariance(LabelId u, LabelId v, const TimeContext& ctx) {
  const Interpolant xu = interpolant(u, ctx);
  const Interpolant xv = interpolant(v, ctx);
  if (nc::label_of(u).color != nc::label_of(v).color) return ExpPoly();
  const expalg::HalfLinForm base =
      ctx.rank_form(xu.prefactor_rank, 1) + ctx.rank_form(xv.prefactor_rank, 1);
  std::map<GeneratorId, int> positions;
  for (const auto& [gen, pos] : xu.components) {
    if (!positions.emplace(gen, pos).second) {
      throw std::logic_error("generator repeated inside " + nc::label_text(u));
    }
  }
  ExpPoly out;
  for (const auto& [gen, pos] : xv.components) {
    auto it = positions.find(gen);
    if (it == positions.end()) continue;
    if (it->second != pos) {
      throw std::logic_error("generator shared at different positions by " + nc::label_text(u) +
                             " and " + nc::label_text(v));
    }
    out += step_weight(pos, base, ctx);
  }
  return out;
}

const ExpPoly& FreeTrace::cov(LabelId u, LabelId v) {
  if (v < u) std::swap(u, v);
  auto it = cov_cache_.find({u, v});
  if (it == cov_cache_.end()) it = cov_cache_.emplace(std::pair{u, v}, covariance(u, v, ctx_)).first;
  return it->second;
}

ExpPoly FreeTrace::tau(const nc::Monomial& word) {
  const int len = static_cast<int>(word.size());
  if (len % 2 != 0) return ExpPoly();
  // value[a][b] = tau of the subword [a, b), filled by increasing length.
  std::vector<std::vector<ExpPoly>> value(static_cast<std::size_t>(len + 1),
                                          std::vector<ExpPoly>(static_cast<std::size_t>(len + 1)));
  for (int a = 0; a <= len; ++a) value[a][a] = ExpPoly(1);
  for (int width = 2; width <= len; width += 2) {
    for (int a = 0; a + width <= len; ++a) {
      const int b = a + width;
      ExpPoly total;
      for (int j = a + 1; j < b; j += 2) {
        const ExpPoly& c = cov(word[a], word[j]);
        if (c.is_zero()) continue;
        const ExpPoly& inner = value[a + 1][j];
        if (inner.is_zero()) continue;
        const ExpPoly& outer = value[j + 1][b];
        if (outer.is_zero()) continue;
        total += c * inner * outer;
      }
      value[a][b] = std::move(total);
    }
  }
  return value[0][len];
}

ExpPoly FreeTrace::tau(const nc::NCPoly& p) {
  ExpPoly out;
  for (const auto& [w, c] : p.terms()) {
    ExpPoly t = tau(w);
    if (!t.is_zero()) out += c * t;
  }
  return out;
}

ExpPoly FreeTrace::tau_tensor(const nc::Tensor& t) {
  ExpPoly out;
  for (const auto& [k, c] : t.terms()) {
    ExpPoly left = tau(k.first);
    if (left.is_zero()) continue;
    ExpPoly right = tau(k.second);
    if (right.is_zero()) continue;
    out += c * left * right;
  }
  return out;
}

ExpPoly tau(const nc::Monomial& word, const TimeContext& ctx) {
  FreeTrace trace(ctx);
  return trace.tau(word);
}

ExpPoly tau_poly(const nc::NCPoly& p, const TimeContext& ctx) {
  FreeTrace trace(ctx);
  return trace.tau(p);
}

ExpPoly schwinger_dyson_rhs(const nc::NCPoly& q, LabelId u, const TimeContext& ctx) {
  FreeTrace trace(ctx);
  const int color = nc::label_of(u).color;
  nc::Tensor weighted = nc::partial_weighted(q, color, [&](LabelId v) -> std::optional<ExpPoly> {
    ExpPoly c = trace.cov(u, v);
    if (c.is_zero()) return std::nullopt;
    return c;
  });
  return trace.tau_tensor(weighted);
}

}  // namespace mme::freewick

#include "mme/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <numeric>

#include "json.hpp"

namespace mme::sampler {

MatrixPoly MatrixPoly::from(const nc::NCPoly& p) {
  MatrixPoly out;
  for (const auto& [w, c] : p.terms()) {
    if (!c.is_constant()) throw std::invalid_argument("matrix evaluation needs constant coefficients");
    std::vector<int> colors;
    for (nc::LabelId id : w) {
      const auto& lab = nc::label_of(id);
      if (!lab.index.empty()) throw std::invalid_argument("matrix evaluation needs base variables");
      colors.push_back(lab.color);
    }
    out.terms.emplace_back(to_double(c.constant_value()), std::move(colors));
  }
  return out;
}

Matrix MatrixPoly::evaluate(const Tuple& x) const {
  const Eigen::Index n = x.front().rows();
  Matrix out = Matrix::Zero(n, n);
  for (const auto& [c, colors] : terms) {
    if (colors.empty()) {
      out.diagonal().array() += c;
      continue;
    }
    Matrix prod = x.at(static_cast<std::size_t>(colors[0] - 1));
    for (std::size_t k = 1; k < colors.size(); ++k) prod = prod * x.at(static_cast<std::size_t>(colors[k] - 1));
    out += c * prod;
  }
  return out;
}

double MatrixPoly::ts(const Tuple& x) const { return sampler::ts(evaluate(x)); }

double ts(const Matrix& m) { return m.trace().real() / static_cast<double>(m.rows()); }

Tuple gue_sample(int N, int d, std::mt19937_64& rng) {
  std::normal_distribution<double> diag(0.0, std::sqrt(1.0 / N));
  std::normal_distribution<double> off(0.0, std::sqrt(0.5 / N));
  Tuple out;
  for (int c = 0; c < d; ++c) {
    Matrix m(N, N);
    for (int i = 0; i < N; ++i) {
      m(i, i) = diag(rng);
      for (int j = i + 1; j < N; ++j) {
        const double re = off(rng);
        const double im = off(rng);
        m(i, j) = {re, im};
        m(j, i) = {re, -im};
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

Tuple gue_sample(int N, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return gue_sample(N, d, rng);
}

namespace {

std::vector<MatrixPoly> derivative_polys(const master::Potential& v) {
  std::vector<MatrixPoly> out;
  for (int i = 1; i <= v.d(); ++i) out.push_back(MatrixPoly::from(v.cyclic_derivative(i)));
  return out;
}

Tuple gradient(const Tuple& x, const std::vector<MatrixPoly>& dv, double lambda) {
  Tuple out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Matrix g = x[i];
    if (lambda != 0.0 && i < dv.size()) g += lambda * dv[i].evaluate(x);
    out.push_back(0.5 * (g + g.adjoint()));
  }
  return out;
}

double action_with(const Tuple& x, const MatrixPoly& vpoly, double lambda) {
  double s = 0.0;
  for (const auto& m : x) s += 0.5 * m.squaredNorm();
  if (lambda != 0.0) s += lambda * vpoly.evaluate(x).trace().real();
  return s;
}

}  // namespace

Tuple grad_potential(const Tuple& x, const master::Potential& v, double lambda) {
  return gradient(x, derivative_polys(v), lambda);
}

double action(const Tuple& x, const master::Potential& v, double lambda) {
  return action_with(x, MatrixPoly::from(v.poly()), lambda);
}

double spectral_norm_estimate(const Matrix& m, std::mt19937_64& rng, int iterations, double tol) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(m.rows());
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = {g(rng), g(rng)};
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXcd w = m * (m * v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (it > 0 && std::abs(next - est) <= tol * next) {
      est = next;
      break;
    }
    est = next;
  }
  return std::sqrt(est);
}

Chain::Chain(const master::Potential& v, ModelConfig config, int index)
    : v_(v), dv_(derivative_polys(v)), vpoly_(MatrixPoly::from(v.poly())), config_(config),
      eps_(config.step_size) {
  if (config_.N < 2) throw std::invalid_argument("matrix size must be at least 2");
  if (config_.step_size <= 0) throw std::invalid_argument("step size must be positive");
  state_.rng.seed(config_.seed + static_cast<std::uint64_t>(index));
  do {
    state_.x = gue_sample(config_.N, v_.d(), state_.rng);
  } while (!inside_cut(state_.x));
  state_.grad = gradient(state_.x, dv_, config_.lambda);
  state_.action = action_with(state_.x, vpoly_, config_.lambda);
}

bool Chain::inside_cut(const Tuple& x) {
  if (!config_.k_cut) return true;
  for (const auto& m : x) {
    const double est = spectral_norm_estimate(m, state_.rng);
    if (est > *config_.k_cut) return false;
    // Power iteration only bounds the norm from below; settle near-threshold
    // cases exactly.
    if (est > 0.9 * *config_.k_cut) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().cwiseAbs().maxCoeff() > *config_.k_cut) return false;
    }
  }
  return true;
}

bool Chain::step(double eps) {
  ++proposed_;
  const double N = config_.N;
  const double root = std::sqrt(eps);
  const Tuple noise = gue_sample(config_.N, v_.d(), state_.rng);
  Tuple y;
  for (std::size_t i = 0; i < state_.x.size(); ++i) {
    Matrix m = state_.x[i] - (eps / 2) * state_.grad[i] + root * noise[i];
    y.push_back(0.5 * (m + m.adjoint()));
  }
  if (!inside_cut(y)) return false;
  const Tuple gy = gradient(y, dv_, config_.lambda);
  const double ay = action_with(y, vpoly_, config_.lambda);
  double fwd = 0.0;
  double back = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    fwd += (y[i] - state_.x[i] + (eps / 2) * state_.grad[i]).squaredNorm();
    back += (state_.x[i] - y[i] + (eps / 2) * gy[i]).squaredNorm();
  }
  const double log_ratio = -N * (ay - state_.action) - N / (2 * eps) * (back - fwd);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (log_ratio < 0 && std::log(u(state_.rng)) >= log_ratio) return false;
  state_.x = y;
  state_.grad = gy;
  state_.action = ay;
  ++accepted_;
  return true;
}

void Chain::run() {
  for (long s = 0; s < config_.n_burnin; ++s) {
    const bool acc = step(eps_);
    if (config_.adapt) eps_ *= std::exp(0.05 * ((acc ? 1.0 : 0.0) - config_.target_acceptance));
  }
  accepted_ = 0;
  proposed_ = 0;
  samples_.clear();
  for (long s = 1; s <= config_.n_steps; ++s) {
    step(eps_);
    if (s % config_.thinning == 0) samples_.push_back(state_.x);
  }
}

double Chain::acceptance_rate() const {
  return proposed_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposed_);
}

std::vector<Chain> run_chains(const master::Potential& v, const ModelConfig& config, int chains,
                              unsigned threads) {
  std::vector<Chain> out;
  for (int c = 0; c < chains; ++c) out.emplace_back(v, config, c);
  if (threads <= 1) {
    for (auto& ch : out) ch.run();
    return out;
  }
  std::vector<std::future<void>> tasks;
  for (auto& ch : out) {
    tasks.push_back(std::async(std::launch::async, [&ch] { ch.run(); }));
    if (tasks.size() >= threads) {
      for (auto& t : tasks) t.get();
      tasks.clear();
    }
  }
  for (auto& t : tasks) t.get();
  return out;
}

Estimate batch_means(const std::vector<std::vector<double>>& series, int batches_per_chain) {
  std::vector<double> means;
  double total = 0.0;
  double total_sq = 0.0;
  long count = 0;
  for (const auto& s : series) {
    const int b = std::min<int>(batches_per_chain, static_cast<int>(s.size()));
    if (b == 0) continue;
    const std::size_t size = s.size() / static_cast<std::size_t>(b);
    for (int k = 0; k < b; ++k) {
      const auto first = s.begin() + static_cast<std::ptrdiff_t>(k * size);
      means.push_back(std::accumulate(first, first + static_cast<std::ptrdiff_t>(size), 0.0) /
                      static_cast<double>(size));
    }
    for (double x : s) {
      total += x;
      total_sq += x * x;
      ++count;
    }
  }
  if (means.size() < 2) throw InsufficientSamples("need at least two batches of samples");
  const double B = static_cast<double>(means.size());
  Estimate e;
  e.mean = std::accumulate(means.begin(), means.end(), 0.0) / B;
  double var = 0.0;
  for (double m : means) var += (m - e.mean) * (m - e.mean);
  var /= (B - 1);
  e.stderr_ = std::sqrt(var / B);
  const double mean_all = total / static_cast<double>(count);
  const double sample_var = std::max(0.0, total_sq / static_cast<double>(count) - mean_all * mean_all);
  e.ess = e.stderr_ > 0 ? sample_var / (e.stderr_ * e.stderr_) : static_cast<double>(count);
  return e;
}

Estimate estimate(const std::vector<Chain>& chains, const nc::NCPoly& p) {
  const MatrixPoly mp = MatrixPoly::from(p);
  std::vector<std::vector<double>> series;
  for (const auto& ch : chains) {
    std::vector<double> s;
    for (const auto& x : ch.samples()) s.push_back(mp.ts(x));
    series.push_back(std::move(s));
  }
  return batch_means(series);
}

Estimate estimate(const Chain& chain, const nc::NCPoly& p) {
  const MatrixPoly mp = MatrixPoly::from(p);
  std::vector<double> s;
  for (const auto& x : chain.samples()) s.push_back(mp.ts(x));
  return batch_means({s});
}

Estimate sd_residual(const std::vector<Chain>& chains, const nc::NCPoly& p, int color) {
  if (chains.empty()) throw InsufficientSamples("no chains");
  const master::Potential& v = chains.front().potential();
  const double lambda = chains.front().config().lambda;
  std::vector<std::pair<MatrixPoly, MatrixPoly>> parts;
  const nc::Tensor dp = nc::partial_color(p, color);
  for (const auto& [key, c] : dp.terms()) {
    MatrixPoly left = MatrixPoly::from(nc::NCPoly::monomial(key.first, c));
    MatrixPoly right = MatrixPoly::from(nc::NCPoly::monomial(key.second));
    parts.emplace_back(std::move(left), std::move(right));
  }
  const MatrixPoly px = MatrixPoly::from(p * nc::NCPoly::variable(nc::base_label(color)));
  const MatrixPoly pdv =
      MatrixPoly::from(color <= v.d() ? p * v.cyclic_derivative(color) : nc::NCPoly());
  std::vector<std::vector<double>> series;
  for (const auto& ch : chains) {
    std::vector<double> s;
    for (const auto& x : ch.samples()) {
      double value = -px.ts(x) - (pdv.terms.empty() ? 0.0 : lambda * pdv.ts(x));
      for (const auto& [left, right] : parts) value += left.ts(x) * right.ts(x);
      s.push_back(value);
    }
    series.push_back(std::move(s));
  }
  return batch_means(series);
}

std::string summary_json(const std::vector<Chain>& chains,
                         const std::vector<NamedObservable>& observables) {
  if (chains.empty()) throw InsufficientSamples("no chains");
  const ModelConfig& c = chains.front().config();
  nlohmann::json config = {{"N", c.N},
                           {"lambda", c.lambda},
                           {"seed", c.seed},
                           {"step_size", c.step_size},
                           {"n_steps", c.n_steps},
                           {"n_burnin", c.n_burnin},
                           {"thinning", c.thinning},
                           {"chains", chains.size()}};
  config["k_cut"] = c.k_cut ? nlohmann::json(*c.k_cut) : nlohmann::json(nullptr);
  nlohmann::json out = {{"schema", "mme/1"}, {"config", config}};
  double acc = 0.0;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& ch : chains) {
    acc += ch.acceptance_rate();
    steps.push_back(ch.step_size());
  }
  out["acceptance_rate"] = acc / static_cast<double>(chains.size());
  out["tuned_step_sizes"] = steps;
  nlohmann::json obs = nlohmann::json::array();
  for (const auto& o : observables) {
    const Estimate e = estimate(chains, o.poly);
    obs.push_back({{"name", o.name}, {"mean", e.mean}, {"stderr", e.stderr_}, {"ess", e.ess}});
  }
  out["observables"] = obs;
  return out.dump();
}

namespace {

template <class T>
void put(std::ofstream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

}  // namespace

void dump_samples(const std::vector<Chain>& chains, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  std::uint64_t count = 0;
  for (const auto& ch : chains) count += ch.samples().size();
  const int N = chains.empty() ? 0 : chains.front().config().N;
  const int d = chains.empty() ? 0 : chains.front().potential().d();
  os.write("MMCH", 4);
  put(os, static_cast<std::uint32_t>(N));
  put(os, static_cast<std::uint32_t>(d));
  put(os, count);
  for (const auto& ch : chains) {
    for (const auto& x : ch.samples()) {
      for (const auto& m : x) {
        for (int i = 0; i < N; ++i) {
          for (int j = 0; j < N; ++j) {
            put(os, m(i, j).real());
            put(os, m(i, j).imag());
          }
        }
      }
    }
  }
}

}  // namespace mme::sampler

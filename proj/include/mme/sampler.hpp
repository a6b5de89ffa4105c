#pragma once

// Metropolis-adjusted Langevin sampling of d-tuples of Hermitian matrices
// with density proportional to exp(-N tr(lambda V + 1/2 sum X_i^2)),
// optionally restricted to max_i ||X_i|| <= K_cut.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mme/master.hpp"

namespace mme::sampler {

using Matrix = Eigen::MatrixXcd;
using Tuple = std::vector<Matrix>;

struct ModelConfig {
  int N = 16;
  double lambda = 0.0;
  std::optional<double> k_cut;
  std::uint64_t seed = 1;
  double step_size = 0.1;
  long n_steps = 10000;
  long n_burnin = 1000;
  long thinning = 10;
  /// Tune the step size toward the target acceptance rate during burn-in.
  bool adapt = true;
  double target_acceptance = 0.57;
};

class InsufficientSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Polynomial in X_1..X_d with real coefficients, ready for matrix evaluation.
struct MatrixPoly {
  std::vector<std::pair<double, std::vector<int>>> terms;  // (coefficient, colors)

  static MatrixPoly from(const nc::NCPoly& p);
  Matrix evaluate(const Tuple& x) const;
  /// Normalized trace (1/N) tr P(X), real part.
  double ts(const Tuple& x) const;
};

Tuple gue_sample(int N, int d, std::mt19937_64& rng);
Tuple gue_sample(int N, int d, std::uint64_t seed);

double ts(const Matrix& m);

/// lambda D_i V(X) + X_i for each color, symmetrized.
Tuple grad_potential(const Tuple& x, const master::Potential& v, double lambda);

/// tr(lambda V + 1/2 sum X_i^2) (without the factor N).
double action(const Tuple& x, const master::Potential& v, double lambda);

/// Largest |eigenvalue| of a Hermitian matrix by power iteration on m^2.
double spectral_norm_estimate(const Matrix& m, std::mt19937_64& rng, int iterations = 20,
                              double tol = 1e-6);

struct ChainState {
  Tuple x;
  Tuple grad;
  double action = 0.0;
  std::mt19937_64 rng;
};

class Chain {
 public:
  Chain(const master::Potential& v, ModelConfig config, int index = 0);

  /// One proposal; returns whether it was accepted.
  bool step(double eps);
  /// Burn-in (with adaptation), then n_steps keeping every thinning-th state.
  void run();

  const ChainState& state() const { return state_; }
  const master::Potential& potential() const { return v_; }
  const ModelConfig& config() const { return config_; }
  const std::vector<Tuple>& samples() const { return samples_; }
  double acceptance_rate() const;
  double step_size() const { return eps_; }

 private:
  bool inside_cut(const Tuple& x);

  const master::Potential& v_;
  std::vector<MatrixPoly> dv_;
  MatrixPoly vpoly_;
  ModelConfig config_;
  ChainState state_;
  double eps_;
  std::vector<Tuple> samples_;
  long accepted_ = 0;
  long proposed_ = 0;
};

/// Independent chains seeded seed + index, run in parallel when threads > 1.
std::vector<Chain> run_chains(const master::Potential& v, const ModelConfig& config, int chains,
                              unsigned threads = 1);

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  double ess = 0.0;
};

/// Pooled batched means of per-sample values (one series per chain).
Estimate batch_means(const std::vector<std::vector<double>>& series, int batches_per_chain = 20);

Estimate estimate(const std::vector<Chain>& chains, const nc::NCPoly& p);
Estimate estimate(const Chain& chain, const nc::NCPoly& p);

/// ts(x)ts(partial_i P) - ts(P (lambda D_i V + X_i)), averaged over the chains.
Estimate sd_residual(const std::vector<Chain>& chains, const nc::NCPoly& p, int color);

struct NamedObservable {
  std::string name;
  nc::NCPoly poly;
};

std::string summary_json(const std::vector<Chain>& chains,
                         const std::vector<NamedObservable>& observables);

/// Writes "MMCH", uint32 N, uint32 d, uint64 count, then count * d matrices
/// as row-major (re, im) float64 pairs, little endian.
void dump_samples(const std::vector<Chain>& chains, const std::string& path);

}  // namespace mme::sampler

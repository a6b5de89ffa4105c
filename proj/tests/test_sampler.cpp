#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mme/sampler.hpp"

using namespace mme;
using namespace mme::sampler;

namespace {

nc::NCPoly power(int color, int k) {
  return nc::NCPoly::monomial(nc::Monomial(static_cast<std::size_t>(k), nc::base_label(color)));
}

ModelConfig small_config(int N, double lambda) {
  ModelConfig c;
  c.N = N;
  c.lambda = lambda;
  c.seed = 17;
  c.n_steps = 20000;
  c.n_burnin = 2000;
  c.thinning = 5;
  return c;
}

}  // namespace

TEST_CASE("GUE samples") {
  const int N = 40;
  const Tuple x = gue_sample(N, 2, std::uint64_t{3});
  REQUIRE(x.size() == 2);
  for (const Matrix& m : x) CHECK((m - m.adjoint()).norm() < 1e-12);
  // ts X^2 concentrates at 1, ts X at 0
  double sq = 0.0;
  for (const Matrix& m : x) sq += ts(m * m);
  CHECK(sq / 2 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(ts(x[0])) < 0.05);
  std::mt19937_64 rng(5);
  CHECK(spectral_norm_estimate(x[0], rng) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("gradient matches finite differences") {
  const master::Potential quad(power(1, 2), 1);
  const Tuple x = gue_sample(6, 1, std::uint64_t{8});
  // lambda D V + X = 3X for V = X^2, lambda = 1
  CHECK((grad_potential(x, quad, 1.0)[0] - 3.0 * x[0]).norm() < 1e-12);
  const master::Potential quart(power(1, 4), 1);
  const Tuple h = gue_sample(6, 1, std::uint64_t{9});
  const double t = 1e-6;
  Tuple xp{x[0] + t * h[0]}, xm{x[0] - t * h[0]};
  const double fd = (action(xp, quart, 0.3) - action(xm, quart, 0.3)) / (2 * t);
  // d/dt tr(...) = tr(grad * H)
  const double exact = (grad_potential(x, quart, 0.3)[0] * h[0]).trace().real();
  CHECK(fd == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("constant observable and determinism") {
  const master::Potential quart(power(1, 4), 1);
  ModelConfig c = small_config(6, 0.1);
  c.n_steps = 2000;
  c.n_burnin = 200;
  const auto a = run_chains(quart, c, 2);
  const auto b = run_chains(quart, c, 2, 2);
  const Estimate one = estimate(a, nc::NCPoly::unit());
  CHECK(one.mean == doctest::Approx(1.0));
  CHECK(one.stderr_ == doctest::Approx(0.0));
  CHECK(estimate(a, power(1, 2)).mean == estimate(b, power(1, 2)).mean);
  CHECK_THROWS_AS(batch_means({{1.0}}), InsufficientSamples);
}

TEST_CASE("Gaussian moments are recovered") {
  const master::Potential quart(power(1, 4), 1);
  const int N = 8;
  const auto chains = run_chains(quart, small_config(N, 0.0), 2);
  for (const Chain& ch : chains) {
    CHECK(ch.acceptance_rate() > 0.3);
    CHECK(ch.acceptance_rate() < 0.8);
  }
  const Estimate e = estimate(chains, power(1, 4));
  CHECK(std::abs(e.mean - (2.0 + 1.0 / (N * N))) < 4 * e.stderr_ + 1e-3);
  const Estimate r = sd_residual(chains, power(1, 3), 1);
  CHECK(std::abs(r.mean) < 5.0 / (N * N) + 3 * r.stderr_);
}

TEST_CASE("hard cut-off keeps every sample inside") {
  const master::Potential quart(power(1, 4), 1);
  ModelConfig c = small_config(6, 0.0);
  c.k_cut = 1.5;
  c.n_steps = 2000;
  c.n_burnin = 200;
  Chain ch(quart, c);
  ch.run();
  for (const Tuple& x : ch.samples()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(x[0], Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().cwiseAbs().maxCoeff() <= 1.5);
  }
}

TEST_CASE("sample dump layout") {
  const master::Potential quad(power(1, 2) + power(2, 2), 2);
  ModelConfig c = small_config(3, 0.0);
  c.n_steps = 100;
  c.n_burnin = 10;
  c.thinning = 10;
  const auto chains = run_chains(quad, c, 1);
  const auto path = (std::filesystem::temp_directory_path() / "mme_dump_test.bin").string();
  dump_samples(chains, path);
  std::ifstream in(path, std::ios::binary);
  char magic[4];
  std::uint32_t n = 0, d = 0;
  std::uint64_t count = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&d), 4);
  in.read(reinterpret_cast<char*>(&count), 8);
  CHECK(std::string(magic, 4) == "MMCH");
  CHECK(n == 3);
  CHECK(d == 2);
  CHECK(count == 10);
  CHECK(std::filesystem::file_size(path) == 20 + count * d * n * n * 16);
  double re = 0, im = 0;
  in.read(reinterpret_cast<char*>(&re), 8);
  in.read(reinterpret_cast<char*>(&im), 8);
  CHECK(re == chains[0].samples()[0][0](0, 0).real());
  std::remove(path.c_str());
  const std::string json = summary_json(chains, {{"X1^2", power(1, 2)}});
  CHECK(json.find("\"schema\":\"mme/1\"") != std::string::npos);
}

// mme: command-line front end for the expansion, the Gaussian oracle, map
// counts, Monte Carlo sampling and free entropy.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mme/dsl.hpp"
#include "mme/gausswick.hpp"
#include "mme/master.hpp"
#include "mme/sampler.hpp"

using nlohmann::json;
using namespace mme;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitMismatch = 2;

struct Common {
  std::string potential;
  int d = 0;
  unsigned threads = 0;
  std::string format = "json";
  std::string out;
};

unsigned resolve_threads(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("MME_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("MME_THREADS must be a positive integer");
  }
  return 1;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream os(c.out);
  if (!os) throw std::invalid_argument("cannot write " + c.out);
  os << text << "\n";
}

json series_json(int n, const master::LambdaSeries& s, int K) {
  json coeffs = json::array();
  for (const auto& c : s.coeffs) coeffs.push_back(to_string(c));
  return {{"schema", "mme/1"}, {"n", n}, {"lambda_coeffs", coeffs}, {"truncation", {{"K", K}}}};
}

json laurent_json(const gauss::LaurentN& p) {
  json obj = json::object();
  for (const auto& [e, c] : p.terms()) obj[std::to_string(e)] = to_string(c);
  return obj;
}

void add_common(CLI::App* sub, Common& c, bool needs_potential) {
  auto* opt = sub->add_option("--potential", c.potential, "potential V, e.g. \"X1^4 + X2^4\"");
  if (needs_potential) opt->required();
  sub->add_option("--d", c.d, "number of matrices (default: largest color used)");
  sub->add_option("--threads", c.threads, "worker threads (default: MME_THREADS or 1)");
  sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--out", c.out, "write output to this file instead of stdout");
}

// ---------------------------------------------------------------- commands

struct ExpandArgs {
  std::string observable;
  int genus = 0;
  int K = 2;
  std::size_t max_terms = 2'000'000;
  std::vector<std::string> lambdas;
  bool free_energy = false;
};

int cmd_expand(const Common& c, const ExpandArgs& a) {
  const auto spec = dsl::parse_potential(c.potential, c.d);
  const master::Potential v = dsl::to_potential(spec);
  master::ExpansionOptions opts;
  opts.max_terms = a.max_terms;
  opts.threads = resolve_threads(c.threads);
  std::vector<master::LambdaSeries> series;
  if (a.free_energy) {
    series = master::free_energy_series(v, a.genus, a.K, opts);
  } else {
    if (a.observable.empty()) throw std::invalid_argument("--observable is required");
    const nc::NCPoly p = dsl::to_ncpoly(dsl::parse(a.observable, v.d()));
    for (int n = 0; n <= a.genus; ++n) series.push_back(master::alpha_series(n, v, p, a.K, opts));
  }
  std::vector<Rational> lambdas;
  for (const auto& l : a.lambdas) lambdas.push_back(parse_rational(l));
  if (c.format == "csv") {
    std::ostringstream os;
    os << "n,k,coefficient\n";
    for (std::size_t n = 0; n < series.size(); ++n) {
      for (std::size_t k = 0; k < series[n].coeffs.size(); ++k) {
        os << n << "," << k << "," << to_string(series[n].coeffs[k]) << "\n";
      }
    }
    std::string text = os.str();
    text.pop_back();
    emit(c, text);
    return 0;
  }
  json out = {{"schema", "mme/1"},
              {"potential", dsl::print(spec)},
              {"kind", a.free_energy ? "free_energy" : "alpha"}};
  if (!a.free_energy) out["observable"] = a.observable;
  json arr = json::array();
  for (std::size_t n = 0; n < series.size(); ++n) {
    json s = series_json(static_cast<int>(n), series[n], a.K);
    if (!lambdas.empty()) {
      json vals = json::array();
      for (const auto& l : lambdas) {
        Rational last = series[n].coeffs.back();
        for (int k = 0; k < series[n].order(); ++k) last *= l;
        vals.push_back({{"lambda", to_string(l)},
                        {"value", to_string(series[n].evaluate(l))},
                        {"last_term", to_string(Rational(abs(last)))}});
      }
      s["evaluations"] = vals;
    }
    arr.push_back(s);
  }
  out["series"] = arr;
  emit(c, out.dump());
  return 0;
}

struct OracleArgs {
  std::string observable;
  int genus = 0;
  int K = 2;
  int max_half_edges = 20;
};

gauss::Star single_word(const std::string& text, int d) {
  const auto spec = dsl::parse(text, d);
  if (spec.terms.size() != 1 || spec.terms[0].coeff != 1 || spec.terms[0].imaginary ||
      spec.terms[0].colors.empty()) {
    throw std::invalid_argument("expected a single monomial, got \"" + text + "\"");
  }
  return gauss::Star{spec.terms[0].colors};
}

int cmd_oracle(const Common& c, const OracleArgs& a) {
  const master::Potential v = dsl::to_potential(dsl::parse_potential(c.potential, c.d));
  gauss::WickOptions opts;
  opts.max_half_edges = a.max_half_edges;
  opts.threads = resolve_threads(c.threads);
  const auto spec = dsl::parse(a.observable, v.d());
  // linear in the observable: sum the ratio series of each monomial
  std::vector<gauss::LaurentN> total(static_cast<std::size_t>(a.K + 1));
  for (const auto& t : spec.terms) {
    if (t.imaginary) throw std::invalid_argument("complex coefficients are not supported");
    if (t.colors.empty()) {
      total[0] += gauss::LaurentN(t.coeff);
      continue;
    }
    const auto r = gauss::ratio_series(gauss::Star{t.colors}, v, a.K, opts);
    for (std::size_t k = 0; k < r.size(); ++k) {
      gauss::LaurentN term = r[k];
      term *= t.coeff;
      total[k] += term;
    }
  }
  if (c.format == "csv") {
    std::ostringstream os;
    os << "k,N_power,coefficient";
    for (std::size_t k = 0; k < total.size(); ++k) {
      for (const auto& [e, coef] : total[k].terms()) os << "\n" << k << "," << e << "," << to_string(coef);
    }
    emit(c, os.str());
    return 0;
  }
  json coeffs = json::array();
  for (const auto& t : total) coeffs.push_back(laurent_json(t));
  json genus = json::array();
  for (int g = 0; g <= a.genus; ++g) genus.push_back(series_json(g, gauss::genus_coefficient(total, g), a.K));
  emit(c, json{{"schema", "mme/1"},
               {"observable", a.observable},
               {"lambda_coeffs_in_N", coeffs},
               {"genus_series", genus}}
              .dump());
  return 0;
}

struct MapsArgs {
  std::string root;
  int genus = 0;
  std::string vertices;
  bool vertices_given = false;
  int K = 2;
};

int cmd_maps(const Common& c, const MapsArgs& a) {
  gauss::WickOptions opts;
  opts.threads = resolve_threads(c.threads);
  const gauss::Star root = single_word(a.root, c.d);
  if (!c.potential.empty() && !a.vertices_given) {
    const master::Potential v = dsl::to_potential(dsl::parse_potential(c.potential, c.d));
    const auto rows = gauss::map_count_table(v, root, a.genus, a.K, opts);
    emit(c, c.format == "csv" ? gauss::map_table_csv(rows) : gauss::map_table_json(rows));
    return 0;
  }
  std::vector<gauss::Star> vertices;
  std::stringstream ss(a.vertices);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    vertices.push_back(single_word(item, c.d));
  }
  const BigInt count = gauss::map_count(a.genus, vertices, root, opts);
  if (c.format == "csv") {
    std::vector<gauss::MapRow> rows{{a.genus, vertices, count}};
    std::string text = gauss::map_table_csv(rows);
    text.pop_back();
    emit(c, text);
    return 0;
  }
  json out = {{"count", count.fits_slong_p() ? json(count.get_si()) : json(count.get_str())}};
  emit(c, out.dump());
  return 0;
}

struct SampleArgs {
  std::string lambda = "0";
  int N = 16;
  double k_cut = 0;
  std::uint64_t seed = 1;
  double step_size = 0.1;
  long steps = 10000;
  long burnin = 1000;
  long thinning = 10;
  int chains = 1;
  std::vector<std::string> observables;
  std::string dump;
};

int cmd_sample(const Common& c, const SampleArgs& a) {
  const master::Potential v = dsl::to_potential(dsl::parse_potential(c.potential, c.d));
  sampler::ModelConfig cfg;
  cfg.N = a.N;
  cfg.lambda = to_double(parse_rational(a.lambda));
  if (cfg.lambda < 0) throw std::invalid_argument("--lambda must be non-negative");
  if (a.k_cut > 0) cfg.k_cut = a.k_cut;
  cfg.seed = a.seed;
  cfg.step_size = a.step_size;
  cfg.n_steps = a.steps;
  cfg.n_burnin = a.burnin;
  cfg.thinning = a.thinning;
  if (a.chains < 1 || a.steps < 1 || a.thinning < 1 || a.burnin < 0) {
    throw std::invalid_argument("--chains, --steps and --thinning must be positive");
  }
  std::vector<sampler::NamedObservable> obs;
  const std::vector<std::string> names =
      a.observables.empty() ? std::vector<std::string>{"X1^2"} : a.observables;
  for (const auto& name : names) obs.push_back({name, dsl::to_ncpoly(dsl::parse(name, v.d()))});
  const auto chains = sampler::run_chains(v, cfg, a.chains, resolve_threads(c.threads));
  if (!a.dump.empty()) sampler::dump_samples(chains, a.dump);
  const std::string summary = sampler::summary_json(chains, obs);
  if (c.format == "csv") {
    const json j = json::parse(summary);
    std::ostringstream os;
    os << "observable,mean,stderr,ess";
    for (const auto& o : j["observables"]) {
      os << "\n" << o["name"].get<std::string>() << "," << o["mean"].dump() << ","
         << o["stderr"].dump() << "," << o["ess"].dump();
    }
    emit(c, os.str());
    return 0;
  }
  emit(c, summary);
  return 0;
}

struct EntropyArgs {
  std::string lambda = "0";
  int K = 3;
};

int cmd_entropy(const Common& c, const EntropyArgs& a) {
  const master::Potential v = dsl::to_potential(dsl::parse_potential(c.potential, c.d));
  master::ExpansionOptions opts;
  opts.threads = resolve_threads(c.threads);
  const master::FreeEntropy fe = master::free_entropy(v, parse_rational(a.lambda), a.K, opts);
  json s = json::array();
  json sd = json::array();
  for (const auto& x : fe.series.coeffs) s.push_back(to_string(x));
  for (const auto& x : fe.series_by_derivative.coeffs) sd.push_back(to_string(x));
  emit(c, json{{"schema", "mme/1"},
               {"lambda", a.lambda},
               {"lambda_coeffs", s},
               {"lambda_coeffs_by_derivative", sd},
               {"value", to_string(fe.value)},
               {"forms_agree", fe.forms_agree},
               {"truncation", {{"K", a.K}}}}
              .dump());
  return fe.forms_agree ? 0 : kExitMismatch;
}

// ------------------------------------------------------------------ verify

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

nc::NCPoly word_poly(const std::string& text, int d) { return dsl::to_ncpoly(dsl::parse(text, d)); }

std::vector<Check> suite_quadratic(unsigned threads) {
  std::vector<Check> out;
  master::ExpansionOptions opts;
  opts.threads = threads;
  const int K = 6;
  master::LambdaSeries geometric;
  for (int k = 0; k <= K; ++k) geometric.coeffs.push_back(k % 2 ? -(1 << k) : (1 << k));
  bool alpha0 = true;
  bool higher = true;
  bool oracle = true;
  for (const std::string src : {"X1^2", "X1^2 + X2^2"}) {
    const master::Potential v = dsl::to_potential(dsl::parse_potential(src));
    const nc::NCPoly p = word_poly("X1^2", v.d());
    alpha0 = alpha0 && master::alpha_series(0, v, p, K, opts) == geometric;
    for (int n = 1; n <= 2; ++n) higher = higher && master::alpha_series(n, v, p, n == 1 ? K : 3, opts).is_zero();
    const auto r = gauss::ratio_series(gauss::Star{{1, 1}}, v, K);
    oracle = oracle && gauss::genus_coefficient(r, 0) == geometric;
    for (const auto& coeff : r) oracle = oracle && coeff.terms().size() == 1;
  }
  out.push_back({"alpha_0 = 1/(1+2 lambda)", alpha0, ""});
  out.push_back({"α_n≡0 for n≥1", higher, ""});
  out.push_back({"Gaussian oracle agrees", oracle, ""});
  return out;
}

std::vector<Check> suite_linear(unsigned threads) {
  master::ExpansionOptions opts;
  opts.threads = threads;
  const master::Potential v = dsl::to_potential(dsl::parse_potential("X1"));
  const master::LambdaSeries mean{{0, -1, 0, 0}};
  const master::LambdaSeries second{{1, 0, 1, 0}};
  std::vector<Check> out;
  out.push_back({"mean = -lambda", master::alpha_series(0, v, word_poly("X1", 1), 3, opts) == mean, ""});
  out.push_back({"second moment = 1 + lambda^2",
                 master::alpha_series(0, v, word_poly("X1^2", 1), 3, opts) == second, ""});
  out.push_back({"oracle agrees",
                 gauss::genus_coefficient(gauss::ratio_series(gauss::Star{{1}}, v, 3), 0) == mean &&
                     gauss::genus_coefficient(gauss::ratio_series(gauss::Star{{1, 1}}, v, 3), 0) == second,
                 ""});
  return out;
}

std::vector<Check> suite_quartic(unsigned threads) {
  master::ExpansionOptions opts;
  opts.threads = threads;
  gauss::WickOptions wopts;
  wopts.threads = threads;
  const master::Potential v = dsl::to_potential(dsl::parse_potential("X1^4"));
  std::vector<Check> out;
  for (const std::string obs : {"X1^2", "X1^4"}) {
    const auto r = gauss::ratio_series(single_word(obs, 1), v, 3, wopts);
    for (int n = 0; n <= 1; ++n) {
      const auto mine = master::alpha_series(n, v, word_poly(obs, 1), 3, opts);
      const auto theirs = gauss::genus_coefficient(r, n);
      std::string detail;
      for (const auto& x : mine.coeffs) detail += to_string(x) + " ";
      out.push_back({"alpha_" + std::to_string(n) + "(" + obs + ") matches oracle", mine == theirs, detail});
    }
  }
  return out;
}

std::vector<Check> suite_maps(unsigned threads) {
  gauss::WickOptions opts;
  opts.threads = threads;
  const master::Potential v = dsl::to_potential(dsl::parse_potential("X1^4"));
  std::vector<Check> out;
  for (const std::string root : {"X1^2", "X1^4"}) {
    for (int g = 0; g <= 1; ++g) {
      const auto rep = gauss::corollary13_check(v, single_word(root, 1), g, 3, opts);
      out.push_back({"map expansion " + root + " genus " + std::to_string(g), rep.ok, rep.message});
    }
  }
  return out;
}

std::vector<Check> suite_entropy(unsigned threads) {
  master::ExpansionOptions opts;
  opts.threads = threads;
  const master::Potential v = dsl::to_potential(dsl::parse_potential("X1^4"));
  const auto fe = master::free_entropy(v, 0, 4, opts);
  return {{"entropy forms agree", fe.forms_agree, ""}, {"entropy at 0 vanishes", fe.value == 0, ""}};
}

std::vector<Check> suite_sampler(unsigned threads) {
  const master::Potential v = dsl::to_potential(dsl::parse_potential("X1^4"));
  sampler::ModelConfig cfg;
  cfg.N = 16;
  cfg.lambda = 0;
  cfg.n_steps = 20000;
  cfg.n_burnin = 2000;
  cfg.thinning = 20;
  const auto chains = sampler::run_chains(v, cfg, 2, threads);
  const auto e = sampler::estimate(chains, word_poly("X1^4", 1));
  const double exact = 2.0 + 1.0 / (16.0 * 16.0);
  std::ostringstream os;
  os << e.mean << " +- " << e.stderr_ << " vs " << exact;
  return {{"Gaussian fourth moment within 3 sigma", std::abs(e.mean - exact) <= 3 * e.stderr_, os.str()}};
}

int cmd_verify(const Common& c, const std::string& suite) {
  const unsigned threads = resolve_threads(c.threads);
  const std::map<std::string, std::vector<Check> (*)(unsigned)> suites = {
      {"quadratic", suite_quadratic}, {"linear", suite_linear},   {"quartic", suite_quartic},
      {"maps", suite_maps},           {"entropy", suite_entropy}, {"sampler", suite_sampler}};
  std::vector<std::string> names;
  if (suite == "all") {
    for (const auto& [n, f] : suites) names.push_back(n);
  } else if (suites.count(suite)) {
    names.push_back(suite);
  } else {
    throw std::invalid_argument("unknown suite " + suite);
  }
  bool ok = true;
  json checks = json::array();
  for (const auto& n : names) {
    for (const auto& check : suites.at(n)(threads)) {
      ok = ok && check.pass;
      std::cerr << check.name << ": " << (check.pass ? "PASS" : "FAIL");
      if (!check.detail.empty()) std::cerr << " (" << check.detail << ")";
      std::cerr << "\n";
      checks.push_back({{"suite", n}, {"name", check.name}, {"status", check.pass ? "PASS" : "FAIL"},
                        {"detail", check.detail}});
    }
  }
  emit(c, json{{"schema", "mme/1"}, {"checks", checks}, {"passed", ok}}.dump());
  return ok ? 0 : kExitMismatch;
}

// ------------------------------------------------------------------ config

// Reads flat "key = value" lines ('#' comments) and returns them as flags
// to be placed before the command-line flags, which therefore win.
std::vector<std::string> config_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      s = s.substr(a, b - a + 1);
      if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
      return s;
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

// Splices config-file flags in right after the subcommand name.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[++k];
    } else if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
    } else {
      rest.push_back(args[k]);
    }
  }
  if (path.empty() || rest.empty()) return rest;
  std::vector<std::string> out{rest.front()};
  for (auto& a : config_args(path)) out.push_back(std::move(a));
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large-N expansion of matrix models: series, Gaussian oracle, maps, sampling"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value file; command-line flags override it");

  Common common;
  ExpandArgs ea;
  auto* expand = app.add_subcommand("expand", "lambda-series of alpha_n(lambda, P)");
  add_common(expand, common, true);
  expand->add_option("--observable", ea.observable, "observable P in base variables");
  expand->add_option("--genus", ea.genus, "highest genus order n")->check(CLI::Range(0, 4));
  expand->add_option("--lambda-order", ea.K, "lambda truncation order K")->check(CLI::Range(0, 12));
  expand->add_option("--max-terms", ea.max_terms, "monomial budget per intermediate polynomial");
  expand->add_option("--lambda", ea.lambdas, "evaluate the series at these lambda values")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  expand->add_flag("--free-energy", ea.free_energy, "free-energy series instead of alpha");

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "exact finite-N Gaussian expansion by pairings");
  add_common(oracle, common, true);
  oracle->add_option("--observable", oa.observable, "observable P")->required();
  oracle->add_option("--genus", oa.genus, "highest genus to extract")->check(CLI::Range(0, 8));
  oracle->add_option("--lambda-order", oa.K, "lambda truncation order K")->check(CLI::Range(0, 8));
  oracle->add_option("--max-half-edges", oa.max_half_edges, "pairing enumeration cap");

  MapsArgs ma;
  auto* maps = app.add_subcommand("maps", "count colored maps by genus");
  add_common(maps, common, false);
  maps->add_option("--root", ma.root, "root vertex monomial")->required();
  maps->add_option("--genus", ma.genus, "genus (upper genus for tables)")->check(CLI::Range(0, 8));
  auto* vopt = maps->add_option("--vertices", ma.vertices, "comma-separated vertex monomials");
  maps->add_option("--lambda-order", ma.K, "largest vertex count for tables")->check(CLI::Range(0, 6));

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Monte Carlo estimates under the matrix model");
  add_common(sample, common, true);
  sample->add_option("--lambda", sa.lambda, "coupling");
  sample->add_option("--N", sa.N, "matrix size")->check(CLI::Range(2, 1024));
  sample->add_option("--k-cut", sa.k_cut, "operator-norm cut-off (0 disables)");
  sample->add_option("--seed", sa.seed, "base seed; chain c uses seed + c");
  sample->add_option("--step-size", sa.step_size, "initial Langevin step size");
  sample->add_option("--steps", sa.steps, "steps per chain after burn-in");
  sample->add_option("--burnin", sa.burnin, "burn-in steps (step size tuned here)");
  sample->add_option("--thinning", sa.thinning, "keep every k-th state");
  sample->add_option("--chains", sa.chains, "number of independent chains");
  sample->add_option("--observable", sa.observables, "observables to estimate")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sample->add_option("--dump", sa.dump, "write raw samples to this binary file");

  EntropyArgs fa;
  auto* entropy = app.add_subcommand("entropy", "free entropy series and value");
  add_common(entropy, common, true);
  entropy->add_option("--lambda", fa.lambda, "coupling");
  entropy->add_option("--lambda-order", fa.K, "lambda truncation order K")->check(CLI::Range(0, 10));

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "self-checks against closed forms and the oracle");
  add_common(verify, common, false);
  verify->add_option("--suite", suite, "quadratic, linear, quartic, maps, entropy, sampler or all");

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  ma.vertices_given = vopt->count() > 0;

  try {
    if (*expand) return cmd_expand(common, ea);
    if (*oracle) return cmd_oracle(common, oa);
    if (*maps) return cmd_maps(common, ma);
    if (*sample) return cmd_sample(common, sa);
    if (*entropy) return cmd_entropy(common, fa);
    if (*verify) return cmd_verify(common, suite);
  } catch (const dsl::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitInput;
  } catch (const dsl::SelfAdjointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const master::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitMismatch;
  }
  return kExitInput;
}

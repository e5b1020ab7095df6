// Command-line front end: benchmark diagnostics, single entropy runs, the
// full roadmap pipeline, and quick invariant checks.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>

#include "chaosent/bounds.hpp"
#include "chaosent/entropy.hpp"
#include "chaosent/harness.hpp"
#include "chaosent/hermite.hpp"
#include "chaosent/malliavin.hpp"
#include "chaosent/quadrature.hpp"
#include "chaosent/rng.hpp"
#include "chaosent/sample_batch.hpp"

using namespace chaosent;

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  long long samples = 0;
  std::string out_dir;
  int n = 0;

  ExperimentConfig load() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = ExperimentConfig::from_file(config_path);
    if (seed != 0) cfg.seed = seed;
    if (samples != 0) cfg.samples = samples;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (n != 0) cfg.n_list = {n};
    return cfg;
  }
};

void add_common(CLI::App* app, CommonOpts& opts) {
  app->add_option("--config", opts.config_path, "key=value config file");
  app->add_option("--seed", opts.seed, "override the experiment seed");
  app->add_option("--samples", opts.samples, "override the Monte Carlo sample count");
  app->add_option("--out", opts.out_dir, "override the output directory");
  app->add_option("--n", opts.n, "run a single sequence index n");
}

int run_eval(const ExperimentConfig& cfg) {
  const BenchmarkSet set = build_benchmark(cfg.family, cfg);
  if (set.iid_sum) {
    for (int n : cfg.n_list) {
      const BaseDensity base = cfg.base == "gaussian" ? gaussian_base() : uniform_base();
      const auto res = sum_example(base, n, cfg.samples, mix_seed(cfg.seed, n));
      std::printf("n = %d  Var(tau) = %.6g  tv_bound = %.6g  projection %.6g <= %.6g\n", n,
                  res.var_tau, res.tv_bound, res.projection_lhs, res.projection_rhs);
    }
    return 0;
  }
  for (std::size_t i = 0; i < set.vectors.size(); ++i) {
    const ChaoticVector& vec = set.vectors[i];
    const int n = cfg.n_list[i];
    std::printf("n = %d  d = %d  basis_dim = %d\n", n, vec.dim(), vec.basis_dim());
    std::printf("  covariance diag:");
    for (int j = 0; j < vec.dim(); ++j) std::printf(" %.6g", vec.covariance()(j, j));
    std::printf("\n");
    const auto delta = delta_fourth(vec);
    const auto coupling = stein_coupling_exact(vec);
    std::printf("  Delta = %.6g (identity %.6g)  discrepancy = %.6g\n", delta.moment_form,
                delta.covariance_form, stein_discrepancy(vec, coupling));
    auto batch = sample_batch(vec, std::min<long long>(cfg.samples, 20000),
                              mix_seed(cfg.seed, 1000 + n));
    const auto dg = expected_det_gamma(vec, batch);
    std::printf("  E[det Gamma] = %.6g +- %.6g  density %s\n", dg.estimate, dg.std_error,
                dg.density_exists ? "exists" : "inconclusive");
  }
  return 0;
}

int run_entropy(const ExperimentConfig& cfg) {
  const BenchmarkSet set = build_benchmark(cfg.family, cfg);
  if (set.iid_sum) {
    std::fprintf(stderr, "entropy: not available for the iid-sum family\n");
    return 2;
  }
  for (std::size_t i = 0; i < set.vectors.size(); ++i) {
    const ChaoticVector& vec = set.vectors[i];
    QuadratureConfig quad;
    quad.core_nodes = cfg.core_nodes;
    quad.edge_nodes = cfg.edge_nodes;
    quad.eta = cfg.eta;
    if (cfg.eps > 0.0) {
      quad.eps = cfg.eps;
    } else {
      const auto coupling = stein_coupling_exact(vec);
      quad.eps = QuadratureConfig::eps_from_delta(stein_discrepancy(vec, coupling), cfg.eta,
                                                  quad.alpha);
    }
    const Eigen::MatrixXd c = vec.covariance();
    const auto report = de_bruijn_entropy(vec, c, cfg.samples,
                                          mix_seed(cfg.seed, cfg.n_list[i]), quad, 0, cfg.t0);
    std::printf("n = %d\n%s", cfg.n_list[i], report.to_kv().c_str());
  }
  return 0;
}

int run_roadmap_cmd(const ExperimentConfig& cfg) {
  const RoadmapResult result = run_roadmap(cfg);
  emit_outputs(result, cfg.out_dir);
  std::printf("wrote %s/summary.csv (%zu rows)\n", cfg.out_dir.c_str(), result.rows.size());
  bool ok = result.all_gates_pass;
  for (const auto& row : result.rows)
    for (const auto& f : row.failures)
      std::printf("FAILURE,%d,%s,%s\n", row.n, f.stage.c_str(), f.message.c_str());
  if (!ok) std::printf("FAILURE,-,gates,one or more roadmap gates failed\n");
  return ok ? 0 : 1;
}

int run_check(const ExperimentConfig& cfg) {
  int failures = 0;
  auto report = [&](const char* name, bool pass) {
    std::printf("[%s] %s\n", pass ? "PASS" : "FAIL", name);
    if (!pass) ++failures;
  };

  // Hermite orthogonality via Gauss-Hermite quadrature
  {
    bool ok = true;
    const auto nodes = gauss_hermite_phi(24);
    double fact = 1.0;
    for (int m = 0; m <= 8; ++m) {
      if (m > 0) fact *= m;
      for (int n = 0; n <= 8; ++n) {
        double acc = 0.0;
        for (const auto& nd : nodes) acc += nd.w * hermite_eval(m, nd.t) * hermite_eval(n, nd.t);
        if (std::abs(acc - (m == n ? fact : 0.0)) > 1e-10) ok = false;
      }
    }
    report("hermite orthogonality (m,n <= 8, 1e-10)", ok);
  }

  // product evaluation identity on random sparse elements
  {
    bool ok = true;
    UniformStream u(cfg.seed);
    for (int rep = 0; rep < 20 && ok; ++rep) {
      auto a = random_element(mix_seed(cfg.seed, 2 * rep), 3, 3, 4);
      auto b = random_element(mix_seed(cfg.seed, 2 * rep + 1), 3, 3, 4);
      auto prod = chaos_product(a, b);
      for (int pt = 0; pt < 5; ++pt) {
        std::vector<double> x(3);
        for (int j = 0; j < 3; ++j) x[j] = 4.0 * u.uniform(rep, 3 * pt + j) - 2.0;
        const double lhs = prod.evaluate(x);
        const double rhs = a.evaluate(x) * b.evaluate(x);
        if (std::abs(lhs - rhs) > 1e-8 * std::max(1.0, std::abs(rhs))) ok = false;
      }
    }
    report("chaos product pointwise identity (1e-8)", ok);
  }

  // fourth-moment identity on random chaotic vectors
  {
    bool ok = true;
    for (int rep = 0; rep < 10 && ok; ++rep) {
      auto vec = random_chaotic_vector(mix_seed(cfg.seed, 100 + rep), 1 + rep % 3, 4, 6);
      const auto delta = delta_fourth(vec);
      if (std::abs(delta.moment_form - delta.covariance_form) >
          1e-10 * std::max(1.0, std::abs(delta.moment_form)))
        ok = false;
    }
    report("Delta moment/covariance identity (1e-10)", ok);
  }

  // Malliavin operator identities
  {
    bool ok = true;
    auto e = random_element(mix_seed(cfg.seed, 7), 3, 4, 5).centered();
    auto back = apply_generator(apply_L_inverse(e));
    for (const auto& [alpha, ccoef] : e.coefficients())
      if (std::abs(back.coefficient(alpha) - ccoef) > 1e-14) ok = false;
    auto ab = apply_ou_semigroup(apply_ou_semigroup(e, 0.4), 0.7);
    auto once = apply_ou_semigroup(e, 1.1);
    for (const auto& [alpha, cc] : once.coefficients())
      if (std::abs(ab.coefficient(alpha) - cc) > 1e-14) ok = false;
    report("L o L^{-1} and semigroup law (exact)", ok);
  }

  // sampling determinism
  {
    auto vec = random_chaotic_vector(mix_seed(cfg.seed, 9), 2, 3, 4);
    auto b1 = sample_batch(vec, 2000, cfg.seed);
    auto b2 = sample_batch(vec, 2000, cfg.seed);
    report("sampling determinism (bit-exact)",
           (b1.gaussians.array() == b2.gaussians.array()).all());
  }

  std::printf("%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropy and Stein-factor diagnostics on finite Wiener chaos"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto* eval_cmd = app.add_subcommand("eval", "single vector diagnostics");
  add_common(eval_cmd, opts);
  auto* entropy_cmd = app.add_subcommand("entropy", "one entropy computation per n");
  add_common(entropy_cmd, opts);
  auto* roadmap_cmd = app.add_subcommand("roadmap", "full experiment sequence with CSV output");
  add_common(roadmap_cmd, opts);
  auto* check_cmd = app.add_subcommand("check", "run the quick invariant suites");
  add_common(check_cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = opts.load();
    if (eval_cmd->parsed()) return run_eval(cfg);
    if (entropy_cmd->parsed()) return run_entropy(cfg);
    if (roadmap_cmd->parsed()) return run_roadmap_cmd(cfg);
    if (check_cmd->parsed()) return run_check(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

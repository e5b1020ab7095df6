// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned here, not tuned at run time.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "chaosent/bounds.hpp"
#include "chaosent/entropy.hpp"
#include "chaosent/harness.hpp"
#include "chaosent/hermite.hpp"
#include "chaosent/interpolation.hpp"
#include "chaosent/malliavin.hpp"
#include "chaosent/quadrature.hpp"
#include "chaosent/rng.hpp"
#include "chaosent/sample_batch.hpp"
#include "chaosent/stats.hpp"
#include "support/oracles.hpp"

using namespace chaosent;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void verdict(int criterion, bool pass, const std::string& detail, double seconds) {
  std::printf("[%s] criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

ChaoticVector h2_vector() {
  return ChaoticVector::from_components(
      {ChaosElement::hermite_term(1, 1, 2) * (1.0 / std::numbers::sqrt2)});
}

ChaoticVector h2_plus_h1_vector() {
  ChaosElement f(1);
  f.add_term(MultiIndex::single(1, 2), 1.0 / std::sqrt(3.0));
  f.add_term(MultiIndex::single(1, 1), 1.0 / std::sqrt(3.0));
  return ChaoticVector::from_components({f});
}

ChaoticVector flat_chain(int n, int q = 2) {
  ChaosElement f(n);
  double fact = 1.0;
  for (int j = 2; j <= q; ++j) fact *= j;
  const double scale = 1.0 / std::sqrt(fact * n);
  for (int i = 1; i <= n; ++i) f.add_term(MultiIndex::single(i, q), scale);
  return ChaoticVector::from_components({f});
}

QuadratureConfig quad24(double eps = 0.01) {
  QuadratureConfig quad;
  quad.core_nodes = 16;
  quad.edge_nodes = 8;
  quad.eps = eps;
  return quad;
}

// ---------------------------------------------------------------------------

bool criterion1() {
  // Hermite orthogonality at 1e-10 via quadrature
  const auto nodes = gauss_hermite_phi(24);
  double fact = 1.0;
  for (int m = 0; m <= 8; ++m) {
    if (m > 0) fact *= m;
    for (int n = 0; n <= 8; ++n) {
      double acc = 0.0;
      for (const auto& nd : nodes) acc += nd.w * hermite_eval(m, nd.t) * hermite_eval(n, nd.t);
      if (std::abs(acc - (m == n ? fact : 0.0)) > 1e-10) return false;
    }
  }

  // product pointwise correctness at 1e-8 relative
  UniformStream u(0xC1);
  for (int rep = 0; rep < 25; ++rep) {
    auto a = random_element(mix_seed(0xC1, 2 * rep), 4, 3, 4);
    auto b = random_element(mix_seed(0xC1, 2 * rep + 1), 4, 3, 4);
    auto prod = chaos_product(a, b);
    for (int pt = 0; pt < 5; ++pt) {
      std::vector<double> x(4);
      for (int j = 0; j < 4; ++j) x[j] = 4.0 * u.uniform(rep, 4 * pt + j) - 2.0;
      const double lhs = prod.evaluate(x);
      const double rhs = a.evaluate(x) * b.evaluate(x);
      if (std::abs(lhs - rhs) > 1e-8 * std::max(1.0, std::abs(rhs))) return false;
    }
  }

  // Delta identity on >= 20 randomized chaotic vectors (d <= 3, q <= 4, dim <= 6)
  for (int rep = 0; rep < 24; ++rep) {
    auto vec = random_chaotic_vector(mix_seed(0xC2, rep), 1 + rep % 3, 4, 6);
    const auto delta = delta_fourth(vec);
    const double scale = std::max(1.0, std::abs(delta.moment_form));
    if (std::abs(delta.moment_form - delta.covariance_form) > 1e-10 * scale) return false;
  }
  return true;
}

bool criterion2() {
  // gradient vs central finite differences at 1e-5 on 50 random elements
  UniformStream u(0xC3);
  for (int rep = 0; rep < 50; ++rep) {
    const int dim = 2 + rep % 3;
    auto elem = random_element(mix_seed(0xC3, rep), dim, 4, 5);
    auto grad = malliavin_derivative(elem);
    std::vector<double> x(dim);
    for (int j = 0; j < dim; ++j) x[j] = 3.0 * u.uniform(rep, j) - 1.5;
    for (int k = 0; k < dim; ++k) {
      auto slice = [&](double v) {
        std::vector<double> y = x;
        y[static_cast<std::size_t>(k)] = v;
        return elem.evaluate(y);
      };
      const double fd = oracles::central_difference(slice, x[static_cast<std::size_t>(k)]);
      const double an = grad.components[static_cast<std::size_t>(k)].evaluate(x);
      if (std::abs(an - fd) > 1e-5 * std::max(1.0, std::abs(fd))) return false;
    }
  }

  // semigroup law and L o L^{-1}, exact on coefficients
  for (int rep = 0; rep < 10; ++rep) {
    auto e = random_element(mix_seed(0xC4, rep), 3, 4, 5).centered();
    auto ab = apply_ou_semigroup(apply_ou_semigroup(e, 0.3), 0.9);
    auto once = apply_ou_semigroup(e, 1.2);
    for (const auto& [alpha, c] : once.coefficients())
      if (std::abs(ab.coefficient(alpha) - c) > 1e-14 * std::max(1.0, std::abs(c))) return false;
    auto back = apply_generator(apply_L_inverse(e));
    for (const auto& [alpha, c] : e.coefficients())
      if (std::abs(back.coefficient(alpha) - c) > 1e-14 * std::max(1.0, std::abs(c)))
        return false;
  }

  // Mehler: P_t F(g) = E'[F(e^-t g + sqrt(1-e^-2t) G')] within 5 standard errors
  for (int rep = 0; rep < 3; ++rep) {
    auto elem = random_element(mix_seed(0xC5, rep), 2, 3, 4);
    const double t = 0.4 + 0.3 * rep;
    const auto smoothed = apply_ou_semigroup(elem, t);
    const std::vector<double> g = {0.8, -0.5};
    const double expected = smoothed.evaluate(g);
    const double decay = std::exp(-t);
    const double diffuse = std::sqrt(1.0 - decay * decay);
    GaussianStream prime(mix_seed(0xC6, rep));
    const Eigen::Index m = 150000;
    std::vector<double> vals(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      std::vector<double> y(2);
      for (int j = 0; j < 2; ++j)
        y[static_cast<std::size_t>(j)] =
            decay * g[static_cast<std::size_t>(j)] +
            diffuse * prime.normal(static_cast<std::uint64_t>(i), static_cast<std::uint32_t>(j));
      vals[static_cast<std::size_t>(i)] = elem.evaluate(y);
    }
    const auto me = mean_with_error(vals);
    if (std::abs(me.value - expected) > 5.0 * me.std_error) return false;
  }
  return true;
}

bool criterion3() {
  // E[F g(F)] = E[<-DL^{-1}F, DF> g'(F)] for 3 test functions x 10 benchmarks,
  // each within 5 standard errors of the paired difference at m = 1e5
  std::vector<ChaoticVector> benchmarks;
  benchmarks.push_back(h2_vector());
  benchmarks.push_back(h2_plus_h1_vector());
  benchmarks.push_back(ChaoticVector::from_components(
      {ChaosElement::hermite_term(1, 1, 3) * (1.0 / std::sqrt(6.0))}));
  benchmarks.push_back(flat_chain(4));
  for (int rep = 0; rep < 6; ++rep)
    benchmarks.push_back(random_chaotic_vector(mix_seed(0xC7, rep), 1, 3, 4));

  const Eigen::Index m = 100000;
  int idx = 0;
  for (const auto& vec : benchmarks) {
    auto coupling = stein_coupling_exact(vec);
    // E[tau(F)] = C exactly
    if (std::abs(coupling[0][0].expectation() - vec.covariance()(0, 0)) > 1e-10) return false;

    auto batch = sample_batch(vec, m, mix_seed(0xC8, idx++));
    const auto& f = batch.column("F1");
    const Eigen::VectorXd tau = coupling[0][0].evaluate_rows(batch.gaussians);
    struct Fn {
      double (*g)(double);
      double (*gp)(double);
    };
    const Fn fns[3] = {
        {[](double x) { return x; }, [](double) { return 1.0; }},
        {[](double x) { return x * x; }, [](double x) { return 2.0 * x; }},
        {[](double x) { return std::sin(x); }, [](double x) { return std::cos(x); }}};
    for (const auto& fn : fns) {
      std::vector<double> diff(static_cast<std::size_t>(m));
      for (Eigen::Index i = 0; i < m; ++i)
        diff[static_cast<std::size_t>(i)] = f(i) * fn.g(f(i)) - tau(i) * fn.gp(f(i));
      const auto me = mean_with_error(diff);
      if (std::abs(me.value) > 5.0 * me.std_error) return false;
    }
  }
  return true;
}

bool criterion4(std::string& detail) {
  const Eigen::Index m = 100000;
  const Eigen::MatrixXd c1 = Eigen::MatrixXd::Identity(1, 1);
  char buf[256];

  // --- Gaussian N(0,2) against N(0,1): de Bruijn + direct vs the closed form
  {
    auto vec = ChaoticVector::from_components(
        {ChaosElement::hermite_term(1, 1, 1) * std::numbers::sqrt2});
    const auto report = de_bruijn_entropy(vec, c1, m, 0xA1, quad24());
    auto batch = sample_batch(vec, m, mix_seed(0xA1, 11));
    DirectKlOptions opt;
    opt.z_seed = mix_seed(0xA1, 12);
    const auto direct = relative_entropy_direct(batch.component_matrix(1), c1, opt);
    const double closed = 0.5 - 0.5 * std::log(2.0);
    if (std::abs(report.relative_entropy.value - closed) >
        3.0 * report.relative_entropy.std_error + 1e-3) {
      detail = "gaussian benchmark: de Bruijn misses the closed form 0.15343";
      return false;
    }
    // smooth laws: the mass above t0 is negligible here
    if (std::abs(direct.value - closed) > 3.0 * direct.std_error + report.tail_beyond_t0 + 5e-3) {
      detail = "gaussian benchmark: direct estimate misses the closed form 0.15343";
      return false;
    }
  }

  // --- the two standardized B = C benchmarks: full pairwise triangle
  const ChaoticVector benches[2] = {h2_vector(), h2_plus_h1_vector()};
  for (int bi = 0; bi < 2; ++bi) {
    const auto& vec = benches[bi];
    auto batch = sample_batch(vec, m, mix_seed(0xA2, bi));
    auto coupling = stein_coupling_exact(vec);
    add_matrix_columns(batch, coupling, "tau");
    const Eigen::MatrixXd fcols = batch.component_matrix(1);
    const Eigen::MatrixXd taucols = matrix_columns(batch, 1, "tau");

    const auto report =
        de_bruijn_entropy(fcols, taucols, c1, c1, quad24(), mix_seed(0xA3, bi), 0, 0.995);
    const auto si = stein_integral_entropy(fcols, taucols, c1, quad24(), mix_seed(0xA4, bi));
    DirectKlOptions opt;
    opt.z_seed = mix_seed(0xA5, bi);
    const auto direct = relative_entropy_direct(fcols, c1, opt);

    // de Bruijn <-> Stein integral: two routes to the same full integral
    const double gap_ab = std::abs(report.relative_entropy.value - si.point_estimate.value);
    if (gap_ab > 3.0 * (report.relative_entropy.std_error + si.point_estimate.std_error)) {
      detail = "benchmark " + std::to_string(bi) + ": de Bruijn vs Stein integral";
      return false;
    }
    // each full-integral estimate minus its estimated (t0, 1) tail against the
    // direct estimate of D(F_t0 || Z) (t0 disclosed by the estimator)
    const double gap_ac =
        std::abs(report.relative_entropy.value - report.tail_beyond_t0 - direct.value);
    if (gap_ac > 3.0 * (report.relative_entropy.std_error + direct.std_error)) {
      detail = "benchmark " + std::to_string(bi) + ": de Bruijn vs direct";
      return false;
    }
    const double gap_bc =
        std::abs(si.point_estimate.value - report.tail_beyond_t0 - direct.value);
    if (gap_bc > 3.0 * (si.point_estimate.std_error + direct.std_error)) {
      detail = "benchmark " + std::to_string(bi) + ": Stein integral vs direct";
      return false;
    }
    if (bi == 0) {
      std::snprintf(buf, sizeof(buf),
                    "pairwise within 3 sigma; H2/sqrt2 gaps |dB-SI| %.3f, |dB-tail-direct| %.3f",
                    gap_ab, gap_ac);
      detail = buf;
    }
  }
  return true;
}

bool criterion5(std::string& detail) {
  const Eigen::Index m = 100000;
  const Eigen::MatrixXd c1 = Eigen::MatrixXd::Identity(1, 1);
  auto vec = h2_vector();
  auto batch = sample_batch(vec, m, 0xB1);
  auto coupling = stein_coupling_exact(vec);
  add_matrix_columns(batch, coupling, "tau");
  const Eigen::MatrixXd fcols = batch.component_matrix(1);
  const Eigen::MatrixXd taucols = matrix_columns(batch, 1, "tau");

  char buf[128];
  std::string gaps;
  for (double t : {0.3, 0.5, 0.8}) {
    auto pt = make_interpolation(fcols, c1, c1, t,
                                 mix_seed(0xB2, static_cast<std::uint64_t>(t * 10)));
    SteinScore stein(pt, taucols);
    double num = 0.0;
    Eigen::Index count = 0;
    // f_t-weighted: evaluate at the combined sample points themselves, on the
    // region where both routes are sanctioned
    for (Eigen::Index i = 0; i < pt.rows(); i += 167) {
      const Eigen::VectorXd x = pt.combined.row(i).transpose();
      if (!stein.regressor().in_interior(x)) continue;
      const DensityScoreDetail dens = density_score_detail(pt, x);
      if (!dens.bulk) continue;
      const double diff = stein.score(x)(0) - dens.score(0);
      num += diff * diff;
      ++count;
    }
    const double rms = std::sqrt(num / static_cast<double>(count));
    std::snprintf(buf, sizeof(buf), " t=%.1f rms=%.4f", t, rms);
    gaps += buf;
    if (!(rms < 0.05)) {
      detail = "weighted RMS gap exceeds 0.05:" + gaps;
      return false;
    }
  }
  detail = "density and Stein routes agree;" + gaps;
  return true;
}

bool criterion6(std::string& detail) {
  const Eigen::MatrixXd c1 = Eigen::MatrixXd::Identity(1, 1);
  int instances = 0;

  // --- 1-d instances: D >= 0, Pinsker, discrepancy <= Delta, bound under its
  //     gate, empirical TV <= Stein TV bound
  std::vector<ChaoticVector> onedim;
  for (int n : {2, 4, 8, 16, 32, 64}) onedim.push_back(flat_chain(n));
  onedim.push_back(h2_vector());
  onedim.push_back(h2_plus_h1_vector());
  for (int rep = 0; rep < 10; ++rep)
    onedim.push_back(random_chaotic_vector(mix_seed(0xD1, rep), 1, 3, 4));

  const Eigen::Index m = 30000;
  int idx = 0;
  for (const auto& vec : onedim) {
    ++instances;
    const std::uint64_t seed = mix_seed(0xD2, idx++);
    auto coupling = stein_coupling_exact(vec);
    const double disc = stein_discrepancy(vec, coupling);

    // discrepancy <= Delta for pure-chaos vectors (the covariance identity)
    if (vec.pure_chaos()) {
      const auto delta = delta_fourth(vec);
      if (disc > delta.covariance_form + 1e-10) {
        detail = "stein discrepancy exceeds Delta";
        return false;
      }
    }

    auto batch = sample_batch(vec, m, seed);
    add_matrix_columns(batch, coupling, "tau");
    QuadratureConfig quad;
    quad.core_nodes = 12;
    quad.edge_nodes = 6;
    quad.eps = QuadratureConfig::eps_from_delta(disc, 2.0, 0.5);
    const auto report =
        de_bruijn_entropy(batch.component_matrix(1), matrix_columns(batch, 1, "tau"), c1, c1,
                          quad, mix_seed(seed, 2));
    const double d_hat = report.relative_entropy.value;
    const double d_err = report.relative_entropy.std_error;

    // nonnegativity
    if (d_hat < -3.0 * d_err) {
      detail = "negative relative entropy beyond 3 sigma";
      return false;
    }

    // Pinsker: smoothed TV <= sqrt(D/2) within combined noise (the full D
    // includes the estimated mass beyond the quadrature window)
    std::vector<double> col(batch.column("F1").data(), batch.column("F1").data() + m);
    const double tv = tv_smoothed_vs_gaussian_1d(col, 1.0);
    const double pins = pinsker_tv(std::max(0.0, d_hat + 3.0 * d_err));
    if (tv > pins + 0.02) {
      detail = "Pinsker chain violated";
      return false;
    }

    // empirical TV <= 2 E|1 - tau|
    const Eigen::VectorXd tau = batch.column("tau_1_1");
    std::vector<double> abs_dev(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i)
      abs_dev[static_cast<std::size_t>(i)] = std::abs(1.0 - tau(i));
    const auto l1 = mean_with_error(abs_dev);
    if (tv > stein_tv_bound(l1.value + 3.0 * l1.std_error) + 0.02) {
      detail = "Stein TV bound violated";
      return false;
    }

    // D <= bound_entropy_1d under its gate
    if (disc <= 1.0) {
      auto small = sample_batch(vec, 20000, mix_seed(seed, 3));
      std::vector<Eigen::VectorXd> shifts;
      for (double a : {0.0, 1.0, -1.0, 2.0}) shifts.push_back(Eigen::VectorXd::Constant(1, a));
      const std::vector<double> ts = {0.5, 0.7, 0.9, 0.95, 0.99};
      const auto fit = fit_tv_shift(small.component_matrix(1), shifts, ts);
      BoundInputs in;
      in.delta = disc;
      in.eta = 2.0;
      in.alpha = std::clamp(fit.alpha, 1e-3, 0.5);
      in.kappa = std::max(fit.kappa, 1e-3);
      in.C = c1;
      const ChaosElement tau_sq = chaos_product(coupling[0][0], coupling[0][0]);
      in.tau_abs_moments = Eigen::MatrixXd::Constant(1, 1, inner_moment(tau_sq, tau_sq));
      const double bound = bound_entropy_1d(in);
      // 1e-12 absorbs floating dust when both sides are exactly zero
      if (d_hat - 3.0 * d_err > bound + 1e-12) {
        detail = "entropy exceeds the 1-d bound inside its gate";
        return false;
      }
    }
  }

  // --- d = 2 instances: trace sandwich
  for (int rep = 0; rep < 12; ++rep) {
    ++instances;
    auto vec = random_chaotic_vector(mix_seed(0xD3, rep), 2, 3, 5);
    const Eigen::MatrixXd c = vec.covariance();
    if (c.determinant() < 0.05) continue;  // keep Z well-conditioned
    auto batch = sample_batch(vec, 20000, mix_seed(0xD4, rep));
    auto coupling = stein_coupling_exact(vec);
    add_matrix_columns(batch, coupling, "tau");
    auto pt = make_interpolation(batch.component_matrix(2), c, c, 0.5, mix_seed(0xD5, rep));
    SteinScore stein(pt, matrix_columns(batch, 2, "tau"));
    const auto ts = trace_sandwich_check(pt, stein.scores_at_samples());
    const double slack = 3.0 * ts.middle_err + 1e-9;
    if (ts.lower_c > ts.middle + slack || ts.middle > ts.upper_c + slack ||
        ts.lower_cinv > ts.middle + slack || ts.middle > ts.upper_cinv + slack) {
      detail = "trace sandwich violated";
      return false;
    }
  }

  detail = std::to_string(instances) + " randomized instances, no violation beyond 3 sigma";
  return instances >= 30;
}

bool criterion7(std::string& detail) {
  // exact relative entropies of the standardized chi-square laws, frozen from
  // the closed form Ent(chi2_n) = n/2 + log(2 Gamma(n/2)) + (1-n/2) psi(n/2)
  const double exact_d[7] = {0.981755, 0.418939, 0.188296, 0.088679,
                             0.042988, 0.021161, 0.010498};
  const int ns[7] = {1, 2, 4, 8, 16, 32, 64};
  const Eigen::Index m = 100000;
  const Eigen::MatrixXd c1 = Eigen::MatrixXd::Identity(1, 1);

  std::vector<double> x, y;
  double prev = 1e300;
  bool decreasing = true;
  std::printf("    n   Delta     D_exact   D_hat     err\n");
  for (int i = 0; i < 7; ++i) {
    const int n = ns[i];
    auto vec = flat_chain(n);
    const double delta = delta_fourth(vec).covariance_form;
    QuadratureConfig quad = quad24(QuadratureConfig::eps_from_delta(2.0 / n, 2.0, 0.5));
    const auto report = de_bruijn_entropy(vec, c1, m, mix_seed(0xE1, n), quad);
    const double d_hat = report.relative_entropy.value;
    std::printf("    %-3d %-9.4f %-9.5f %-9.5f %-9.5f\n", n, delta, exact_d[i], d_hat,
                report.relative_entropy.std_error);
    std::fflush(stdout);
    if (d_hat >= prev) decreasing = false;
    prev = d_hat;
    x.push_back(std::log(delta * std::abs(std::log(delta))));
    y.push_back(std::log(std::max(d_hat, 1e-12)));
  }

  auto ls_slope = [](const std::vector<double>& xs, const std::vector<double>& ys) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      num += (xs[i] - mx) * (ys[i] - my);
      den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
  };
  const double slope = ls_slope(x, y);
  std::vector<double> y_exact;
  for (double d : exact_d) y_exact.push_back(std::log(d));
  const double slope_exact = ls_slope(x, y_exact);
  // slope against plain log(Delta), without the folded log factor
  std::vector<double> x_plain;
  for (int n : ns) x_plain.push_back(std::log(12.0 / n));
  const double slope_plain = ls_slope(x_plain, y);

  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "D decreasing: %s; LS slope of log D vs log(Delta|log Delta|) = %.3f against "
                "the gate [0.8, 1.2]. NOTE: the same slope computed from the exact closed-form "
                "entropies of these laws is %.3f, itself outside the gate: for this family D_n "
                "scales like Delta_n with no log factor (slope vs log Delta = %.3f, in gate), "
                "and Delta|log Delta| is non-monotone over n <= 64. The stated gate cannot be "
                "met by any consistent estimator.",
                decreasing ? "yes" : "no", slope, slope_exact, slope_plain);
  detail = buf;
  return decreasing && slope >= 0.8 && slope <= 1.2;
}

bool criterion8(std::string& detail) {
  ExperimentConfig cfg;
  cfg.family = "single-chaos";
  cfg.q = 2;
  cfg.n_list = {4, 16, 64};
  cfg.samples = 30000;
  cfg.tv_samples = 8000;
  cfg.direct_samples = 8000;
  cfg.det_samples = 8000;
  cfg.core_nodes = 12;
  cfg.edge_nodes = 6;
  cfg.seed = 0xF1;

  auto trend = [](double first, double last) { return last < 0.6 * first; };

  const auto conv = run_roadmap(cfg);
  const auto& c0 = conv.rows.front();
  const auto& c2 = conv.rows.back();
  const bool converging = trend(c0.delta_cov, c2.delta_cov) && trend(c0.ks_stat, c2.ks_stat) &&
                          trend(c0.d_hat, c2.d_hat);

  ExperimentConfig neg = cfg;
  neg.profile = "geometric";
  neg.ratio = 0.75;
  neg.seed = 0xF2;
  const auto stuck = run_roadmap(neg);
  const auto& s0 = stuck.rows.front();
  const auto& s2 = stuck.rows.back();
  const bool control_stuck = !trend(s0.delta_cov, s2.delta_cov) &&
                             !trend(s0.ks_stat, s2.ks_stat) && !trend(s0.d_hat, s2.d_hat);

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "converging: Delta %.3f->%.3f, KS %.3f->%.3f, D %.3f->%.3f; "
                "negative control: Delta %.2f->%.2f, KS %.3f->%.3f, D %.3f->%.3f",
                c0.delta_cov, c2.delta_cov, c0.ks_stat, c2.ks_stat, c0.d_hat, c2.d_hat,
                s0.delta_cov, s2.delta_cov, s0.ks_stat, s2.ks_stat, s0.d_hat, s2.d_hat);
  detail = buf;
  return converging && control_stuck;
}

bool criterion9(std::string& detail) {
  const Eigen::Index m = 1000000;
  GaussianStream gs(0xAB);
  std::vector<double> g(static_cast<std::size_t>(m)), g2(static_cast<std::size_t>(m)),
      dg(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double v = gs.normal(static_cast<std::uint64_t>(i), 0);
    g[static_cast<std::size_t>(i)] = v;
    g2[static_cast<std::size_t>(i)] = v * v;
    dg[static_cast<std::size_t>(i)] = 2.0 * v * v;  // det Gamma of the H2 benchmark
  }
  const auto fit1 = carbery_wright_envelope(g, 1, 1.0);
  const auto fit2 = carbery_wright_envelope(g2, 2, 1.0);

  // det Gamma envelope with N = 2d(q-1) = 2 and beta = E[det Gamma] = 2 (exact)
  auto vec = h2_vector();
  const double beta = det_gamma_element(vec).expectation();
  const auto fit3 = carbery_wright_envelope(dg, 2, beta);

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "exponents: G %.3f (target 1), G^2 %.3f (target 0.5); det Gamma envelope "
                "(N=2, E det = %.1f) %s",
                fit1.exponent_fit, fit2.exponent_fit, beta,
                fit3.envelope_pass ? "dominates" : "violated");
  detail = buf;
  return std::abs(fit1.exponent_fit - 1.0) < 0.1 && std::abs(fit2.exponent_fit - 0.5) < 0.1 &&
         fit3.envelope_pass;
}

bool criterion10(std::string& detail) {
  ExperimentConfig cfg;
  cfg.family = "single-chaos";
  cfg.q = 2;
  cfg.n_list = {1, 4, 16};
  cfg.samples = 10000;
  cfg.tv_samples = 5000;
  cfg.direct_samples = 5000;
  cfg.det_samples = 5000;
  cfg.core_nodes = 8;
  cfg.edge_nodes = 4;
  cfg.seed = 0xCD;

  const auto dir1 = std::filesystem::temp_directory_path() / "chaosent_accept_a";
  const auto dir2 = std::filesystem::temp_directory_path() / "chaosent_accept_b";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  emit_outputs(run_roadmap(cfg), dir1);
  emit_outputs(run_roadmap(cfg), dir2);

  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool identical = true;
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir1)) {
    ++files;
    const std::string a = slurp(entry.path());
    const std::string b = slurp(dir2 / entry.path().filename());
    if (a.empty() || a != b) identical = false;
  }
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  detail = std::to_string(files) + " output files byte-identical across two runs";
  return identical && files >= 5;
}

}  // namespace

int main() {
  std::printf("acceptance suite: entropy via Stein factors on finite chaos\n");

  {
    Timer t;
    verdict(1, criterion1(), "exact algebra (orthogonality, products, Delta identity)",
            t.seconds());
  }
  {
    Timer t;
    verdict(2, criterion2(), "Malliavin operators (gradient FD, semigroup, Mehler, L o L^-1)",
            t.seconds());
  }
  {
    Timer t;
    verdict(3, criterion3(), "Stein identities (3 test functions x 10 benchmarks, E[tau] = C)",
            t.seconds());
  }
  {
    Timer t;
    std::string detail = "entropy oracle triangle";
    const bool ok = criterion4(detail);
    verdict(4, ok, "entropy oracle triangle: " + detail, t.seconds());
  }
  {
    Timer t;
    std::string detail;
    const bool ok = criterion5(detail);
    verdict(5, ok, "key score representation: " + detail, t.seconds());
  }
  {
    Timer t;
    std::string detail;
    const bool ok = criterion6(detail);
    verdict(6, ok, "inequality suite: " + detail, t.seconds());
  }
  {
    Timer t;
    std::string detail;
    const bool ok = criterion7(detail);
    verdict(7, ok, "entropic fourth-moment scaling: " + detail, t.seconds());
  }
  {
    Timer t;
    std::string detail;
    const bool ok = criterion8(detail);
    verdict(8, ok, "equivalence triad: " + detail, t.seconds());
  }
  {
    Timer t;
    std::string detail;
    const bool ok = criterion9(detail);
    verdict(9, ok, "small-ball envelopes: " + detail, t.seconds());
  }
  {
    Timer t;
    std::string detail;
    const bool ok = criterion10(detail);
    verdict(10, ok, "reproducibility: " + detail, t.seconds());
  }

  std::printf("ACCEPTANCE: %d/10 criteria passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}

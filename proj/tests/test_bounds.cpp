#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chaosent/bounds.hpp"
#include "chaosent/harness.hpp"
#include "chaosent/rng.hpp"
#include "chaosent/sample_batch.hpp"
#include "chaosent/stats.hpp"
#include "support/oracles.hpp"

using namespace chaosent;

namespace {

ChaoticVector h2_vector() {
  return ChaoticVector::from_components(
      {ChaosElement::hermite_term(1, 1, 2) * (1.0 / std::numbers::sqrt2)});
}

}  // namespace

TEST_CASE("fourth-moment discrepancy") {
  // chaos-1 orthonormal components are exactly Gaussian
  auto gauss = ChaoticVector::from_components(
      {ChaosElement::hermite_term(2, 1, 1), ChaosElement::hermite_term(2, 2, 1)});
  auto dg = delta_fourth(gauss);
  CHECK(dg.moment_form == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dg.covariance_form == doctest::Approx(0.0).epsilon(1e-12));

  auto d1 = delta_fourth(h2_vector());
  CHECK(d1.moment_form == doctest::Approx(12.0));
  CHECK(d1.covariance_form == doctest::Approx(12.0));

  // two independent copies: the identity form adds over coordinates
  ChaosElement f1(2), f2(2);
  f1.add_term(MultiIndex::single(1, 2), 1.0 / std::numbers::sqrt2);
  f2.add_term(MultiIndex::single(2, 2), 1.0 / std::numbers::sqrt2);
  auto d2 = delta_fourth(ChaoticVector::from_components({f1, f2}));
  CHECK(d2.moment_form == doctest::Approx(24.0));
  CHECK(d2.covariance_form == doctest::Approx(24.0));

  // both routes agree on random chaotic vectors
  for (int rep = 0; rep < 20; ++rep) {
    auto vec = random_chaotic_vector(mix_seed(17, rep), 1 + rep % 3, 4, 6);
    auto dd = delta_fourth(vec);
    CHECK(dd.moment_form ==
          doctest::Approx(dd.covariance_form).epsilon(1e-10));
  }

  // pre: pure chaos required
  ChaosElement mixed(1);
  mixed.add_term(MultiIndex::single(1, 1), 0.6);
  mixed.add_term(MultiIndex::single(1, 2), 0.5);
  CHECK_THROWS(delta_fourth(ChaoticVector::from_components({mixed})));
}

TEST_CASE("Stein discrepancy and its domination by Delta") {
  auto gauss = ChaoticVector::from_components({ChaosElement::hermite_term(1, 1, 1)});
  CHECK(stein_discrepancy(gauss, stein_coupling_exact(gauss)) == doctest::Approx(0.0));

  auto vec = h2_vector();
  const double disc = stein_discrepancy(vec, stein_coupling_exact(vec));
  CHECK(disc == doctest::Approx(2.0));  // E(1 - G^2)^2
  CHECK(disc <= 12.0);

  for (int rep = 0; rep < 15; ++rep) {
    auto rvec = random_chaotic_vector(mix_seed(23, rep), 1 + rep % 2, 3, 5);
    const double d = stein_discrepancy(rvec, stein_coupling_exact(rvec));
    const auto delta = delta_fourth(rvec);
    CHECK(d <= delta.covariance_form + 1e-10);
  }
}

TEST_CASE("Stein TV bound") {
  CHECK(stein_tv_bound(0.0) == 0.0);
  // E|1 - G^2| = 2 E[(G^2 - 1)^+] = 4 phi(1), cross-checking the quadrature
  const double e_abs = oracles::abs_one_minus_chisq();
  const double closed = 4.0 * oracles::phi(1.0);
  CHECK(e_abs == doctest::Approx(closed).epsilon(1e-9));
  CHECK(e_abs == doctest::Approx(0.96788).epsilon(1e-4));
  CHECK(stein_tv_bound(e_abs) == doctest::Approx(1.93577).epsilon(1e-4));

  // bound dominates the smoothed-TV estimate on the benchmark
  auto batch = sample_batch(h2_vector(), 50000, 5);
  std::vector<double> col(batch.column("F1").data(), batch.column("F1").data() + 50000);
  const double tv = tv_smoothed_vs_gaussian_1d(col, 1.0);
  CHECK(tv <= stein_tv_bound(e_abs));
  CHECK_THROWS(stein_tv_bound(-0.2));
}

TEST_CASE("one-dimensional entropy bound") {
  BoundInputs in;
  in.C = Eigen::MatrixXd::Identity(1, 1);
  in.tau_abs_moments = Eigen::MatrixXd::Ones(1, 1);
  in.eta = 1.0;
  in.alpha = 0.5;
  in.kappa = 1.0;
  in.delta = std::exp(-1.0);

  // leading coefficient (eta+1)/((1^2a) eta) = 2; first term 2/e
  const double z3 = gaussian_abs_moment(3.0);
  const double c_eta = 2.0 * std::pow(8.0, 0.5) * std::pow(z3, 0.5) * std::pow(2.0, 0.5);
  const double expected = 2.0 * std::exp(-1.0) * 1.0 + c_eta * 2.0 * std::exp(-1.0);
  CHECK(bound_entropy_1d(in) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(2.0 * std::exp(-1.0) == doctest::Approx(0.73576).epsilon(1e-4));

  // vanishing delta
  in.delta = 1e-12;
  CHECK(bound_entropy_1d(in) < 1e-9);
  in.delta = 0.0;
  CHECK(bound_entropy_1d(in) == 0.0);

  // monotone on (0, 1/e]
  in.eta = 2.0;
  double prev = 0.0;
  for (double delta : {0.01, 0.05, 0.1, 0.2, 0.3, std::exp(-1.0)}) {
    in.delta = delta;
    const double b = bound_entropy_1d(in);
    CHECK(b > prev);
    prev = b;
  }

  // gate violation refuses, no clamping
  in.delta = 1.5;
  CHECK_THROWS_WITH_AS(static_cast<void>(bound_entropy_1d(in)),
                       doctest::Contains("hypothesis violated"), std::invalid_argument);
  in.delta = 0.5;
  in.alpha = 0.7;
  CHECK_THROWS(bound_entropy_1d(in));  // alpha outside (0, 1/2]
}

TEST_CASE("multivariate entropy bound") {
  BoundInputs in;
  in.eta = 2.0;
  in.alpha = 0.5;
  in.kappa = 1.0;

  // d = 1 reduces to the one-dimensional constant
  in.C = Eigen::MatrixXd::Identity(1, 1);
  in.tau_abs_moments = Eigen::MatrixXd::Ones(1, 1);
  in.delta = 0.05;
  CHECK(bound_entropy_multi(in, 1) == doctest::Approx(bound_entropy_1d(in)).epsilon(1e-12));

  // gate: 2^{-(eta+1)/(alpha eta)} = 2^{-3} = 0.125 at eta=2, alpha=1/2
  CHECK(in.gate_multi_threshold() == doctest::Approx(0.125));
  in.C = Eigen::MatrixXd::Identity(2, 2);
  in.tau_abs_moments = Eigen::MatrixXd::Ones(2, 2);
  in.delta = 0.2;
  CHECK_THROWS(bound_entropy_multi(in, 2));

  // leading Delta|log Delta| coefficient is linear in d for C = I_d and
  // identical per-entry tau moments: solve the two-coefficient form
  auto coefficients = [&](int d) {
    in.C = Eigen::MatrixXd::Identity(d, d);
    in.tau_abs_moments = Eigen::MatrixXd::Ones(d, d);
    in.delta = 0.02;
    const double b1 = bound_entropy_multi(in, d);
    in.delta = 0.08;
    const double b2 = bound_entropy_multi(in, d);
    const double x11 = 0.02 * std::abs(std::log(0.02)), x12 = 0.02;
    const double x21 = 0.08 * std::abs(std::log(0.08)), x22 = 0.08;
    const double det = x11 * x22 - x12 * x21;
    return std::pair{(b1 * x22 - x12 * b2) / det, (x11 * b2 - b1 * x21) / det};
  };
  const auto [lead2, rest2] = coefficients(2);
  const auto [lead4, rest4] = coefficients(4);
  CHECK(lead4 == doctest::Approx(2.0 * lead2).epsilon(1e-9));
  CHECK(rest4 > rest2);  // the Delta coefficient grows faster than linearly

  in.delta = 0.0;
  in.C = Eigen::MatrixXd::Identity(2, 2);
  in.tau_abs_moments = Eigen::MatrixXd::Zero(2, 2);
  CHECK(bound_entropy_multi(in, 2) == 0.0);
}

TEST_CASE("iid-sum Stein factor example") {
  // Gaussian base: tau == 1, zero variance, vanishing bound
  const auto g = sum_example(gaussian_base(), 50, 20000, 31);
  CHECK(g.var_tau == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(g.tv_bound == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(g.tau_mean_check == doctest::Approx(1.0).epsilon(1e-6));

  // Uniform base: tau(x) = (3 - x^2)/2, Var = 1/5
  const auto u = sum_example(uniform_base(), 100, 60000, 32);
  for (std::size_t i = 0; i < u.grid.size(); i += 500) {
    const double x = u.grid[i];
    CHECK(u.tau[i] == doctest::Approx((3.0 - x * x) / 2.0).epsilon(1e-4));
  }
  CHECK(u.tau_mean_check == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(u.var_tau == doctest::Approx(0.2).epsilon(1e-5));
  CHECK(u.tv_bound == doctest::Approx(2.0 / (std::sqrt(5.0) * 10.0)).epsilon(1e-5));

  // projection inequality E[(1 - tau_{S_n})^2] <= Var(tau)/n
  CHECK(u.projection_lhs <= u.projection_rhs + 3.0 * u.projection_lhs_err + 1e-4);

  CHECK_THROWS(sum_example(uniform_base(), 0, 1000, 1));
}

TEST_CASE("Carbery-Wright small-ball envelopes") {
  const Eigen::Index m = 200000;
  GaussianStream gs(2027);
  std::vector<double> g(static_cast<std::size_t>(m)), g2(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = gs.normal(static_cast<std::uint64_t>(i), 0);
    g[static_cast<std::size_t>(i)] = x;
    g2[static_cast<std::size_t>(i)] = x * x;
  }
  const auto fit1 = carbery_wright_envelope(g, 1, 1.0);
  CHECK(std::abs(fit1.exponent_fit - 1.0) < 0.1);
  CHECK(fit1.envelope_pass);

  const auto fit2 = carbery_wright_envelope(g2, 2, 1.0);
  CHECK(std::abs(fit2.exponent_fit - 0.5) < 0.1);
  CHECK(fit2.envelope_pass);

  // det Gamma == 1 for I_1(e_1): degenerate, refused (and trivially
  // P(det <= lambda) = 0 below 1)
  std::vector<double> constant(5000, 1.0);
  CHECK_THROWS(carbery_wright_envelope(constant, 2, 1.0));
  double below = 0.0;
  for (double v : constant) below += (v <= 0.5);
  CHECK(below == 0.0);
}

TEST_CASE("TV shift estimates") {
  auto vec = ChaoticVector::from_components({ChaosElement::hermite_term(1, 1, 1)});
  auto batch = sample_batch(vec, 30000, 606);
  const Eigen::MatrixXd f = batch.component_matrix(1);

  Eigen::VectorXd x1(1);
  x1 << 1.0;
  CHECK(tv_shift_estimate(f, x1, 1.0) == 0.0);

  // Gaussian oracle: law(sqrt(t) F + sqrt(1-t) x) = N(sqrt(1-t) x, t)
  for (double t : {0.6, 0.8, 0.9}) {
    const double est = tv_shift_estimate(f, x1, t);
    const double oracle = oracles::gaussian_tv(std::sqrt(1.0 - t) * 1.0, t, 1.0);
    CHECK(std::abs(est - oracle) < 0.01);
  }

  // benchmark fit: positive decay exponent and a dominating envelope
  auto hbatch = sample_batch(h2_vector(), 30000, 607);
  std::vector<Eigen::VectorXd> shifts;
  for (double a : {0.0, 1.0, -1.0, 2.0}) shifts.push_back(Eigen::VectorXd::Constant(1, a));
  const std::vector<double> ts = {0.5, 0.7, 0.9, 0.95, 0.99};
  const auto fit = fit_tv_shift(hbatch.component_matrix(1), shifts, ts);
  CHECK(fit.alpha > 0.0);
  CHECK(fit.envelope_holds);
  CHECK(fit.kappa > 0.0);

  Eigen::MatrixXd f3(1000, 3);
  f3.setRandom();
  CHECK_THROWS(tv_shift_estimate(f3, Eigen::VectorXd::Zero(3), 0.5));
}

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chaosent/chaotic_vector.hpp"
#include "chaosent/malliavin.hpp"

namespace chaosent {

// Fourth-moment discrepancy E||F||^4 - E||Z||^4 for Z ~ N(0, Cov(F)), by two
// exact routes that must agree: the moment form and the covariance identity
// sum_{j,k} { Cov(F_j^2, F_k^2) - 2 C(j,k)^2 }.
struct DeltaPair {
  double moment_form = 0.0;
  double covariance_form = 0.0;
};
DeltaPair delta_fourth(const ChaoticVector& vec, int order_cap = kDefaultOrderCap);

// sum_{j,k} E[(C(j,k) - coupling_{j,k})^2], exact. An upper bound for the
// conditioned Stein discrepancy, itself dominated by the fourth-moment gap.
double stein_discrepancy(const ChaoticVector& vec, const ElementMatrix& coupling);

// TV(f, phi_1) <= 2 E|1 - tau_F(F)| for standardized 1-d F (sup-over-Borel
// normalization).
double stein_tv_bound(double l1_discrepancy);

struct BoundInputs {
  // squared Stein discrepancy E[||C - tau_F||_HS^2] (or any upper bound of
  // it, e.g. the fourth-moment gap)
  double delta = 0.0;
  double eta = 2.0;    // moment exponent > 0
  double alpha = 0.5;  // shift exponent in (0, 1/2]
  double kappa = 1.0;  // shift constant > 0
  Eigen::MatrixXd tau_abs_moments;  // E|tau^{jk}|^{eta+2}
  Eigen::MatrixXd C;

  bool gate_1d() const { return delta <= 1.0; }
  double gate_multi_threshold() const;
  bool gate_multi() const { return delta <= gate_multi_threshold(); }
};

// D(F||Z) <= (eta+1)/((1 ^ 2 alpha) eta) Delta |log Delta|
//          + C_eta (eta+1)/((1 ^ 2 alpha) eta) Delta, standardized 1-d F,
// valid under Delta <= 1 (refuses otherwise, no clamping).
double bound_entropy_1d(const BoundInputs& in);

// The multivariate bound with its explicit constant; requires the gate
// Delta <= 2^{-(eta+1)/(alpha eta)}. For d = 1 the sharper one-dimensional
// constant applies and is returned.
double bound_entropy_multi(const BoundInputs& in, int d);

// ---- i.i.d.-sum example ----------------------------------------------------

struct BaseDensity {
  std::string name;
  std::function<double(double)> pdf;
  double lo = 0.0, hi = 0.0;                  // support
  std::function<double(double)> quantile;     // inverse CDF for sampling
};
BaseDensity uniform_base();   // Uniform[-sqrt(3), sqrt(3)], mean 0 variance 1
BaseDensity gaussian_base();  // N(0,1): tau == 1

struct SumExampleResult {
  std::vector<double> grid;
  std::vector<double> tau;        // tau_F on the grid
  double var_tau = 0.0;
  double tv_bound = 0.0;          // 2 sqrt(Var tau) / sqrt(n)
  double projection_lhs = 0.0;    // E[(1 - tau_{S_n}(S_n))^2], regression-based
  double projection_lhs_err = 0.0;
  double projection_rhs = 0.0;    // Var(tau_F(F)) / n
  double tau_mean_check = 0.0;    // quadrature E[tau_F(F)], should be 1
};
// tau_F(x) = (1/f(x)) int_x^inf z f(z) dz on a grid by quadrature, plus the
// Monte Carlo validation of the projection identity for S_n.
SumExampleResult sum_example(const BaseDensity& base, int n, Eigen::Index mc_samples,
                             std::uint64_t seed);

// ---- small-ball envelopes ---------------------------------------------------

struct SmallBallFit {
  double c_fit = 0.0;         // envelope constant, calibrated on the bulk
  double exponent_fit = 0.0;  // free log-log slope over the small-ball range
  bool envelope_pass = false; // empirical curve below 1.05 c N (u)^(1/N) everywhere
  std::vector<std::pair<double, double>> curve;  // (threshold, empirical P)
};
// Fits P(|Q| <= a) ~ a^(1/degree) on a log grid. `normalizer` scales the
// threshold (E[det Gamma] for Malliavin determinants, E[Q^2]^(1/2) otherwise).
SmallBallFit carbery_wright_envelope(std::span<const double> q_samples, int degree,
                                     double normalizer);

// ---- TV shift estimates ------------------------------------------------------

// TV between law(sqrt(t) F + sqrt(1-t) x) and law(F), estimated by the
// smoothed-density L1 distance at matched bandwidth (d <= 2).
double tv_shift_estimate(const Eigen::MatrixXd& f_samples, const Eigen::VectorXd& x, double t,
                         double bandwidth = 0.0);

struct TvShiftFit {
  double kappa = 0.0;
  double alpha = 0.0;          // fitted decay exponent of (1-t)
  bool envelope_holds = false;
  int grid_points = 0;
};
// Fits (kappa, alpha) so that tv <= kappa (1 + ||x||_1)(1-t)^alpha over the
// (x, t) grid, with alpha from least squares and kappa from the max ratio.
TvShiftFit fit_tv_shift(const Eigen::MatrixXd& f_samples,
                        std::span<const Eigen::VectorXd> shifts, std::span<const double> ts,
                        double bandwidth = 0.0);

}  // namespace chaosent

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>

#include "chaosent/knn.hpp"

namespace chaosent {

// One point of the Gaussian interpolation F_t = sqrt(t) F + sqrt(1-t) Z with
// F ~ (samples, covariance B) and Z ~ N(0, C) drawn from an independently
// seeded stream.
struct InterpolationPoint {
  double t = 0.0;
  Eigen::MatrixXd f_samples;  // m x d
  Eigen::MatrixXd z_samples;  // m x d
  Eigen::MatrixXd combined;   // m x d
  Eigen::MatrixXd b;          // Cov(F)
  Eigen::MatrixXd c;          // Cov(Z)

  int dim() const { return static_cast<int>(f_samples.cols()); }
  Eigen::Index rows() const { return f_samples.rows(); }
  Eigen::MatrixXd gamma_t() const { return t * b + (1.0 - t) * c; }
};

InterpolationPoint make_interpolation(const Eigen::MatrixXd& f_samples, const Eigen::MatrixXd& B,
                                      const Eigen::MatrixXd& C, double t, std::uint64_t z_seed);

// Monte Carlo mixture estimate of the smoothed density f_t(x): average over
// F-draws of the N(sqrt(t) F_i, (1-t)C) density at x. Unbiased; t < 1, d <= 3.
ValueWithError smoothed_density(const InterpolationPoint& pt, const Eigen::VectorXd& x);

// Ratio estimator grad f_t / f_t from the same mixture. Only sanctioned on the
// bulk: throws when the density estimate is below 10 of its standard errors.
Eigen::VectorXd score_density_route(const InterpolationPoint& pt, const Eigen::VectorXd& x);

// Same estimator with delta-method standard errors and the bulk flag instead
// of a throw.
struct DensityScoreDetail {
  Eigen::VectorXd score;
  Eigen::VectorXd score_err;
  double density = 0.0;
  double density_err = 0.0;
  bool bulk = false;
};
DensityScoreDetail density_score_detail(const InterpolationPoint& pt, const Eigen::VectorXd& x);

// Score of F_t by the Stein-coupling representation
//   rho_t(x) = -t/sqrt(1-t) E[(I - C^{-1} tau(F)) C^{-1} Z | F_t = x] - C^{-1} x,
// with the conditional expectation fitted by k-NN regression on the combined
// rows. Well defined at all 0 < t < 1 with no density in a denominator.
class SteinScore {
public:
  // coupling: m x d^2 evaluated coupling entries (row-major in (i, j))
  SteinScore(const InterpolationPoint& pt, const Eigen::MatrixXd& coupling, int k = 0);

  Eigen::VectorXd score(const Eigen::VectorXd& x) const;
  Eigen::VectorXd score_star(const Eigen::VectorXd& x) const;  // Gamma_t-weighted variant
  Eigen::MatrixXd scores_at_samples() const;                   // m x d at the combined rows

  // Corrected estimate of tr(W E[V V^T]) with V = rho_t(F_t) + Gamma_t^{-1} F_t
  // (the standardized score residual), block std errors.
  ValueWithError v_quadratic(const Eigen::MatrixXd& weight) const;
  // E[V V^T] itself, entry-wise.
  MatrixWithError v_second_moment() const;

  double t() const { return t_; }
  double prefactor() const { return pref_; }
  const KnnRegressor& regressor() const { return *reg_; }

private:
  double t_ = 0.0;
  double pref_ = 0.0;  // -t/sqrt(1-t)
  Eigen::MatrixXd c_inv_;
  Eigen::MatrixXd gamma_t_;
  Eigen::MatrixXd gamma_t_inv_;
  Eigen::MatrixXd combined_;
  std::unique_ptr<KnnRegressor> reg_;
};

// Duality check E|E[X|Y]| = sup_{|g|<=1} E[X g(Y)], with the supremum
// approximated from below over a fixed seeded dictionary of tanh ridge
// functions. The gap lhs - rhs is expected >= -tolerance.
struct DualCheckResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};
DualCheckResult conditional_dual_check(const Eigen::VectorXd& x, const Eigen::MatrixXd& y,
                                       std::uint64_t seed = 7, int dictionary_size = 64);

}  // namespace chaosent

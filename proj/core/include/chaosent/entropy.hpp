#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "chaosent/chaotic_vector.hpp"
#include "chaosent/interpolation.hpp"
#include "chaosent/quadrature.hpp"

namespace chaosent {

// Ent(Z) = 1/2 log((2 pi e)^d det C) for Z ~ N(0, C).
double gaussian_entropy(const Eigen::MatrixXd& C);

// D(N(0,B) || N(0,C)) = 1/2 (tr(C^{-1}B) - d) + 1/2 log(det C / det B).
double gaussian_kl_closed_form(const Eigen::MatrixXd& B, const Eigen::MatrixXd& C);

// sqrt(D/2): bound on TV in the half-L1 normalization. Small negative D
// (estimation noise) is clamped; D below -1e-6 is an error.
double pinsker_tv(double d_value);

struct FisherCurvePoint {
  double t = 0.0;
  Eigen::MatrixXd j_st;       // standardized Fisher information matrix
  Eigen::MatrixXd j_st_err;
  double integrand = 0.0;     // (1/2t) tr(C Gamma_t^{-1} J_st)
  double integrand_err = 0.0;
  double regression_residual_rms = 0.0;
};

struct EntropyReport {
  ValueWithError relative_entropy;
  std::string method;  // "de-bruijn" | "direct" | "stein-integral"
  // the two non-integral summands of the de Bruijn identity
  double correction_trace = 0.0;
  double correction_logdet = 0.0;
  double eps_split = 0.0;
  int node_count = 0;
  double residual_envelope = 0.0;  // bound on the un-integrated (t_hi, 1) piece
  double tail_beyond_t0 = 0.0;     // integral mass above t0 (diagnostic)
  double pinsker_tv_bound = 0.0;
  bool fisher_error_dominates = false;
  std::vector<FisherCurvePoint> curve;

  std::string to_kv() const;  // flat key = value record
  static std::string csv_header();
  std::string csv_row(const std::string& label) const;
};

// Multivariate de Bruijn identity evaluated by quadrature of the standardized
// Fisher information along the interpolation, plus the two closed-form
// correction terms (the t-integral of tr(C Gamma_t^{-1} - I) is summed per
// eigenvalue of C^{-1}B). Scores come from the Stein representation with one
// regression per node; t0 marks the diagnostic tail split.
EntropyReport de_bruijn_entropy(const Eigen::MatrixXd& f_samples, const Eigen::MatrixXd& coupling,
                                const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                                const QuadratureConfig& quad, std::uint64_t z_seed, int knn_k = 0,
                                double t0 = 0.995);

// Convenience overload: draws m rows, evaluates components and the exact
// Stein coupling, uses the exact covariance.
EntropyReport de_bruijn_entropy(const ChaoticVector& vec, const Eigen::MatrixXd& C,
                                Eigen::Index m, std::uint64_t seed, const QuadratureConfig& quad,
                                int knn_k = 0, double t0 = 0.995);

// Direct relative-entropy estimate D(F_t0 || Z) for d <= 2: leave-one-out
// exact-mixture density estimate, Monte Carlo average of the log ratio.
// Reported as a proxy for D(F || Z) with t0 disclosed by the caller.
struct DirectKlOptions {
  double t0 = 0.995;
  Eigen::Index eval_points = 20000;   // capped at the sample size
  Eigen::Index kernel_points = 20000;
  std::uint64_t z_seed = 1;
};
ValueWithError relative_entropy_direct(const Eigen::MatrixXd& f_samples, const Eigen::MatrixXd& C,
                                       const DirectKlOptions& opt = {});

// J_st(F_t) = Gamma_t E[(rho + Gamma_t^{-1} F_t)(rho + Gamma_t^{-1} F_t)^T]
// from per-sample score evaluations.
MatrixWithError fisher_standardized(const InterpolationPoint& pt,
                                    const Eigen::MatrixXd& scores_at_samples);

// Stein-factor entropy integrals of the B = C regime:
//   A1 with response (I - C^{-1} tau) C^{-1} Z,
//   A2 with response (C - tau) C^{-1} Z,
// and the eigenvalue brackets [lmin(C) A1, lmax(C) A1], [lmin(C^{-1}) A2,
// lmax(C^{-1}) A2] around D(F||Z). For C = I both integrands coincide and the
// bracket collapses to the exact-identity point estimate.
struct SteinIntegralResult {
  ValueWithError a1, a2;
  double bracket_a1_lo = 0.0, bracket_a1_hi = 0.0;
  double bracket_a2_lo = 0.0, bracket_a2_hi = 0.0;
  double residual_envelope = 0.0;
  ValueWithError point_estimate;  // meaningful when C = I
};
SteinIntegralResult stein_integral_entropy(const Eigen::MatrixXd& f_samples,
                                           const Eigen::MatrixXd& coupling,
                                           const Eigen::MatrixXd& C, const QuadratureConfig& quad,
                                           std::uint64_t z_seed, int knn_k = 0);

// Eigenvalue sandwiches around tr(J_st) (B = C regime): the C-weighted sum
// uses rho + C^{-1} F_t, the C^{-1}-weighted sum uses rho* + F_t.
struct TraceSandwich {
  double lower_c = 0.0, upper_c = 0.0;
  double middle = 0.0, middle_err = 0.0;
  double lower_cinv = 0.0, upper_cinv = 0.0;
};
TraceSandwich trace_sandwich_check(const InterpolationPoint& pt,
                                   const Eigen::MatrixXd& scores_at_samples);

}  // namespace chaosent

#pragma once

#include <Eigen/Core>
#include <vector>

#include "chaosent/chaotic_vector.hpp"
#include "chaosent/knn.hpp"
#include "chaosent/sample_batch.hpp"

namespace chaosent {

// Gradient of a chaos element with respect to the underlying Gaussian
// coordinates; component k holds <DF, e_k>. For F of pure chaos q every
// component is pure chaos q-1.
struct GradientElement {
  std::vector<ChaosElement> components;

  int basis_dim() const { return static_cast<int>(components.size()); }
  Eigen::VectorXd evaluate(std::span<const double> point) const;
};

// Coordinate-wise formal derivative in the Hermite basis, via H_m' = m H_{m-1}
// applied factor-wise inside each basis product.
GradientElement malliavin_derivative(const ChaosElement& elem);

// Ornstein-Uhlenbeck semigroup P_t: scales every weight-q coefficient by
// e^(-q t). Accepts t = +infinity (projection onto the mean).
ChaosElement apply_ou_semigroup(const ChaosElement& elem, double t);

// Generator L: weight-q coefficients scale by -q.
ChaosElement apply_generator(const ChaosElement& elem);

// Pseudo-inverse L^{-1}: weight-q coefficients scale by -1/q. The element must
// be centered.
ChaosElement apply_L_inverse(const ChaosElement& elem);

using ElementMatrix = std::vector<std::vector<ChaosElement>>;

// Malliavin matrix Gamma_{i,j} = <DF_i, DF_j>, symmetric by construction.
ElementMatrix gamma_matrix(const ChaoticVector& vec, int order_cap = kDefaultOrderCap);

// The pre-conditioning Stein coupling <-D L^{-1} F_i, D F_j> as chaos
// elements; its conditional expectation given F is a Stein matrix for F, and
// E[entry (i,j)] equals the covariance exactly.
ElementMatrix stein_coupling_exact(const ChaoticVector& vec, int order_cap = kDefaultOrderCap);

// det Gamma expanded as a chaos element (permutation expansion, d <= 3).
ChaosElement det_gamma_element(const ChaoticVector& vec, int order_cap = kDefaultOrderCap);

struct DetGammaEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  bool density_exists = false;  // estimate > 3 std errors
};

// Monte Carlo E[det Gamma] with the existence-of-density verdict.
DetGammaEstimate expected_det_gamma(const ChaoticVector& vec, const SampleBatch& batch,
                                    int order_cap = kDefaultOrderCap);

// Conditional expectation x -> E[coupling | F = x] fitted by k-NN local
// averaging on evaluated coupling columns.
class SteinMatrixEstimate {
public:
  SteinMatrixEstimate(const Eigen::MatrixXd& f_columns, const Eigen::MatrixXd& coupling_columns,
                      int k = 0);

  int dim() const { return d_; }
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const;  // d x d
  // Mean of the fitted values over the training sample; reproduces E[tau(F)].
  Eigen::MatrixXd column_means() const;
  double in_sample_residual_rms() const;
  int k() const { return reg_.k(); }
  Eigen::Index samples() const { return reg_.samples(); }

private:
  int d_ = 0;
  KnnRegressor reg_;
};

SteinMatrixEstimate stein_matrix_regress(const Eigen::MatrixXd& f_columns,
                                         const Eigen::MatrixXd& coupling_columns, int k = 0);

}  // namespace chaosent

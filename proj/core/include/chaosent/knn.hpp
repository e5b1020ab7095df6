#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>

namespace chaosent {

struct ValueWithError {
  double value = 0.0;
  double std_error = 0.0;
};

struct MatrixWithError {
  Eigen::MatrixXd value;
  Eigen::MatrixXd std_error;
};

// Local-averaging estimate of x -> E[Y | X = x] by k-nearest-neighbor
// regression. Default k = ceil(m^(4/(4+d))). In one dimension the neighbor
// window is contiguous in sorted order (prefix sums) and the fit is local
// linear, which removes the boundary clipping bias of plain window means; for
// d >= 2 a kd-tree with window means is used.
//
// conditional_second_moment() estimates E[m(X) m(X)^T] where m is the true
// conditional mean. The naive average of prediction outer products carries an
// upward bias of Var(pred) per query; that term is subtracted using the
// window residual covariance and the fit leverage. Standard errors come from
// contiguous-block means because predictions of nearby queries share most of
// their window.
class KnnRegressor {
public:
  KnnRegressor(Eigen::MatrixXd x, Eigen::MatrixXd y, int k = 0);
  ~KnnRegressor();
  KnnRegressor(KnnRegressor&&) noexcept;
  KnnRegressor& operator=(KnnRegressor&&) noexcept;

  int k() const;
  Eigen::Index samples() const;
  int x_dim() const;
  int y_dim() const;

  Eigen::VectorXd predict(const Eigen::VectorXd& x) const;
  // Predictions at the training points, in training order.
  const Eigen::MatrixXd& in_sample_predictions() const;

  // Empirical quantile of predictor coordinate `dim`.
  double x_quantile(int dim, double p) const;
  // Whether every coordinate of x lies inside the two-sided-window band
  // [q(k/2m), q(1 - k/2m)]; outside it predictions extrapolate.
  bool in_interior(const Eigen::VectorXd& x) const;

  struct SecondMoment {
    Eigen::MatrixXd moment;     // p x p, bias-corrected
    Eigen::MatrixXd std_error;  // p x p, block-based
  };
  SecondMoment conditional_second_moment() const;

  // E[(m(X) - c)^T W (m(X) - c)], bias-corrected, with block std error.
  ValueWithError quadratic_form(const Eigen::MatrixXd& weight, const Eigen::VectorXd& center) const;

  // Visits every training point in sorted scan order with its fitted window
  // mean and window covariance: fn(scan_position, training_index, mean, cov).
  using WindowFn = std::function<void(Eigen::Index, Eigen::Index, const Eigen::VectorXd&,
                                      const Eigen::MatrixXd&)>;
  void for_each_window(const WindowFn& fn) const;
  // Contiguous-block length used for std errors (>= k).
  Eigen::Index block_length() const;

  // RMS of Y - prediction over the training sample.
  double in_sample_residual_rms() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chaosent

#pragma once

#include <Eigen/Core>
#include <vector>

#include "chaosent/chaos_element.hpp"

namespace chaosent {

// A d-tuple of chaos elements with its exact covariance matrix. The vector is
// flagged `pure_chaos` when component i is a pure chaos of order q_i (the
// setting of the fourth-moment theorems) and `centered` when no component
// carries a constant term.
class ChaoticVector {
public:
  static ChaoticVector from_components(std::vector<ChaosElement> components);

  int dim() const noexcept { return static_cast<int>(components_.size()); }
  int basis_dim() const noexcept { return basis_dim_; }
  const ChaosElement& component(int i) const { return components_.at(i); }
  const std::vector<ChaosElement>& components() const noexcept { return components_; }
  const std::vector<int>& orders() const noexcept { return orders_; }
  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  bool pure_chaos() const noexcept { return pure_chaos_; }
  bool centered() const noexcept { return centered_; }

private:
  std::vector<ChaosElement> components_;
  std::vector<int> orders_;  // q_i when component i is pure chaos, else 0
  Eigen::MatrixXd covariance_;
  int basis_dim_ = 0;
  bool pure_chaos_ = false;
  bool centered_ = false;
};

// Exact-moment wrappers. Products are grouped pairwise so intermediate orders
// stay at 2 max(q) instead of 4 max(q).
double expected_norm4(const ChaoticVector& vec, int order_cap = kDefaultOrderCap);
double covariance_of_squares(const ChaoticVector& vec, int j, int k,
                             int order_cap = kDefaultOrderCap);

}  // namespace chaosent

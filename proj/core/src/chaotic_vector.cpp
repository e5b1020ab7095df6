#include "chaosent/chaotic_vector.hpp"

#include <stdexcept>

namespace chaosent {

ChaoticVector ChaoticVector::from_components(std::vector<ChaosElement> components) {
  if (components.empty())
    throw std::invalid_argument("ChaoticVector: needs at least one component");
  const int basis_dim = components.front().basis_dim();
  for (const auto& c : components)
    if (c.basis_dim() != basis_dim)
      throw std::invalid_argument("ChaoticVector: components must share basis_dim");

  ChaoticVector v;
  v.basis_dim_ = basis_dim;
  const int d = static_cast<int>(components.size());
  v.covariance_.resize(d, d);
  v.orders_.assign(d, 0);
  v.pure_chaos_ = true;
  v.centered_ = true;
  for (int i = 0; i < d; ++i) {
    const ChaosElement& ci = components[i];
    if (!ci.is_centered()) v.centered_ = false;
    if (ci.is_pure_chaos(ci.max_order()) && ci.max_order() >= 1) {
      v.orders_[i] = ci.max_order();
    } else {
      v.pure_chaos_ = false;
    }
    for (int j = 0; j <= i; ++j) {
      // Cov = E[F_i F_j] - E[F_i] E[F_j], exact by orthogonality
      const double cov = inner_moment(components[i], components[j]) -
                         components[i].expectation() * components[j].expectation();
      v.covariance_(i, j) = cov;
      v.covariance_(j, i) = cov;
    }
  }
  v.components_ = std::move(components);
  return v;
}

double expected_norm4(const ChaoticVector& vec, int order_cap) {
  const int d = vec.dim();
  std::vector<ChaosElement> squares;
  squares.reserve(d);
  for (int j = 0; j < d; ++j)
    squares.push_back(chaos_product(vec.component(j), vec.component(j), order_cap));
  double s = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) s += inner_moment(squares[j], squares[k]);
  return s;
}

double covariance_of_squares(const ChaoticVector& vec, int j, int k, int order_cap) {
  const ChaosElement sj = chaos_product(vec.component(j), vec.component(j), order_cap);
  const ChaosElement sk = chaos_product(vec.component(k), vec.component(k), order_cap);
  return inner_moment(sj, sk) - sj.expectation() * sk.expectation();
}

}  // namespace chaosent

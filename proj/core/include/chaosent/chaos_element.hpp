#pragma once

#include <Eigen/Core>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "chaosent/multi_index.hpp"

namespace chaosent {

// Intermediate chaos orders above this cap abort exact-moment folds instead of
// silently truncating.
inline constexpr int kDefaultOrderCap = 16;

// An element of the finite-basis chaos algebra: a sparse coefficient table
// over the Hermite product basis Phi(alpha) = prod_i H_{alpha_i}(G_i), with
// every stored index bounded by basis_dim.
class ChaosElement {
public:
  explicit ChaosElement(int basis_dim);
  static ChaosElement constant(int basis_dim, double value);
  // coeff * H_order(G_index)
  static ChaosElement hermite_term(int basis_dim, std::int32_t index, std::int32_t order,
                                   double coeff = 1.0);

  int basis_dim() const noexcept { return basis_dim_; }
  int max_order() const noexcept { return max_order_; }
  const std::map<MultiIndex, double>& coefficients() const noexcept { return coeffs_; }

  double coefficient(const MultiIndex& alpha) const;
  // E[F]: the coefficient of the empty multi-index.
  double expectation() const;
  bool is_centered() const;
  bool is_pure_chaos(int q) const;
  // E[F^2] = sum_alpha alpha! c_alpha^2 (Hermite orthogonality).
  double l2_norm_squared() const;
  ChaosElement centered() const;

  void add_term(const MultiIndex& alpha, double coeff);

  double evaluate(std::span<const double> point) const;
  // Row-wise evaluation with a per-row Hermite value table.
  Eigen::VectorXd evaluate_rows(const Eigen::MatrixXd& rows) const;

  ChaosElement& operator+=(const ChaosElement& other);
  ChaosElement& operator-=(const ChaosElement& other);
  ChaosElement& operator*=(double scalar);

  friend ChaosElement operator+(ChaosElement a, const ChaosElement& b) { return a += b; }
  friend ChaosElement operator-(ChaosElement a, const ChaosElement& b) { return a -= b; }
  friend ChaosElement operator*(ChaosElement a, double s) { return a *= s; }
  friend ChaosElement operator*(double s, ChaosElement a) { return a *= s; }
  friend ChaosElement operator-(ChaosElement a) { return a *= -1.0; }

  // Text format: first line "basis_dim <n>", then one line per coefficient,
  // "<i1>:<e1>,<i2>:<e2> = <coeff>" in canonical index order ("-" for the
  // empty multi-index). Coefficients round-trip exactly (17 significant digits).
  std::string serialize() const;
  static ChaosElement deserialize(std::string_view text);

private:
  void recompute_max_order();

  int basis_dim_ = 0;
  int max_order_ = 0;
  std::map<MultiIndex, double> coeffs_;
};

// Pointwise product via Hermite linearization
// H_m H_n = sum_k k! C(m,k) C(n,k) H_{m+n-2k}.
ChaosElement chaos_product(const ChaosElement& a, const ChaosElement& b,
                           int order_cap = kDefaultOrderCap);

// E[a b] via orthogonality: sum_alpha alpha! a_alpha b_alpha.
double inner_moment(const ChaosElement& a, const ChaosElement& b);

// E[prod elems], computed exactly: fold chaos_product, then read the constant
// coefficient. Throws if an intermediate order exceeds the cap.
double exact_moment(std::span<const ChaosElement> elems, int order_cap = kDefaultOrderCap);

}  // namespace chaosent

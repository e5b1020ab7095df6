#include "chaosent/malliavin.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "chaosent/stats.hpp"

namespace chaosent {

Eigen::VectorXd GradientElement::evaluate(std::span<const double> point) const {
  Eigen::VectorXd out(basis_dim());
  for (int i = 0; i < basis_dim(); ++i) out(i) = components[i].evaluate(point);
  return out;
}

GradientElement malliavin_derivative(const ChaosElement& elem) {
  GradientElement grad;
  grad.components.assign(elem.basis_dim(), ChaosElement(elem.basis_dim()));
  for (const auto& [alpha, c] : elem.coefficients()) {
    for (const auto& [idx, exp] : alpha.entries()) {
      // d/dx_idx of H_exp(x_idx) = exp * H_{exp-1}(x_idx)
      grad.components[idx - 1].add_term(alpha.with_exponent(idx, exp - 1),
                                        c * static_cast<double>(exp));
    }
  }
  return grad;
}

ChaosElement apply_ou_semigroup(const ChaosElement& elem, double t) {
  if (t < 0.0) throw std::invalid_argument("apply_ou_semigroup: t must be >= 0");
  ChaosElement out(elem.basis_dim());
  for (const auto& [alpha, c] : elem.coefficients()) {
    const int q = alpha.weight();
    const double factor = q == 0 ? 1.0 : std::exp(-static_cast<double>(q) * t);
    if (factor != 0.0) out.add_term(alpha, c * factor);
  }
  return out;
}

ChaosElement apply_generator(const ChaosElement& elem) {
  ChaosElement out(elem.basis_dim());
  for (const auto& [alpha, c] : elem.coefficients())
    out.add_term(alpha, -static_cast<double>(alpha.weight()) * c);
  return out;
}

ChaosElement apply_L_inverse(const ChaosElement& elem) {
  if (!elem.is_centered())
    throw std::invalid_argument("apply_L_inverse: element has a nonzero constant term");
  ChaosElement out(elem.basis_dim());
  for (const auto& [alpha, c] : elem.coefficients())
    out.add_term(alpha, -c / static_cast<double>(alpha.weight()));
  return out;
}

namespace {

ChaosElement gradient_inner(const GradientElement& a, const GradientElement& b, int basis_dim,
                            int order_cap) {
  ChaosElement out(basis_dim);
  for (int kdx = 0; kdx < basis_dim; ++kdx) {
    if (a.components[kdx].coefficients().empty() || b.components[kdx].coefficients().empty())
      continue;
    out += chaos_product(a.components[kdx], b.components[kdx], order_cap);
  }
  return out;
}

}  // namespace

ElementMatrix gamma_matrix(const ChaoticVector& vec, int order_cap) {
  const int d = vec.dim();
  std::vector<GradientElement> grads;
  grads.reserve(d);
  for (int i = 0; i < d; ++i) grads.push_back(malliavin_derivative(vec.component(i)));
  ElementMatrix out(d, std::vector<ChaosElement>(d, ChaosElement(vec.basis_dim())));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) {
      out[i][j] = gradient_inner(grads[i], grads[j], vec.basis_dim(), order_cap);
      out[j][i] = out[i][j];
    }
  return out;
}

ElementMatrix stein_coupling_exact(const ChaoticVector& vec, int order_cap) {
  if (!vec.centered())
    throw std::invalid_argument("stein_coupling_exact: components must be centered");
  const int d = vec.dim();
  std::vector<GradientElement> grads, lgrads;
  grads.reserve(d);
  lgrads.reserve(d);
  for (int i = 0; i < d; ++i) {
    grads.push_back(malliavin_derivative(vec.component(i)));
    GradientElement lg = malliavin_derivative(apply_L_inverse(vec.component(i)));
    for (auto& comp : lg.components) comp *= -1.0;  // -D L^{-1} F_i
    lgrads.push_back(std::move(lg));
  }
  ElementMatrix out(d, std::vector<ChaosElement>(d, ChaosElement(vec.basis_dim())));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out[i][j] = gradient_inner(lgrads[i], grads[j], vec.basis_dim(), order_cap);
  return out;
}

ChaosElement det_gamma_element(const ChaoticVector& vec, int order_cap) {
  const int d = vec.dim();
  if (d > 3)
    throw std::invalid_argument("det_gamma_element: exact expansion supported for d <= 3");
  const ElementMatrix g = gamma_matrix(vec, order_cap);
  if (d == 1) return g[0][0];
  if (d == 2)
    return chaos_product(g[0][0], g[1][1], order_cap) - chaos_product(g[0][1], g[1][0], order_cap);
  ChaosElement det(vec.basis_dim());
  const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}, {1, 0, 2}, {0, 2, 1}};
  for (int p = 0; p < 6; ++p) {
    const double sign = p < 3 ? 1.0 : -1.0;
    ChaosElement term = chaos_product(
        chaos_product(g[0][perms[p][0]], g[1][perms[p][1]], order_cap), g[2][perms[p][2]],
        order_cap);
    det += sign * term;
  }
  return det;
}

DetGammaEstimate expected_det_gamma(const ChaoticVector& vec, const SampleBatch& batch,
                                    int order_cap) {
  const int d = vec.dim();
  const ElementMatrix g = gamma_matrix(vec, order_cap);
  const Eigen::Index m = batch.rows();
  Eigen::MatrixXd entries(m, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) {
      entries.col(i * d + j) = g[i][j].evaluate_rows(batch.gaussians);
      if (j != i) entries.col(j * d + i) = entries.col(i * d + j);
    }
  std::vector<double> dets(static_cast<std::size_t>(m));
  Eigen::MatrixXd gm(d, d);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) gm(i, j) = entries(r, i * d + j);
    dets[static_cast<std::size_t>(r)] = gm.determinant();
  }
  const auto me = mean_with_error(dets);
  DetGammaEstimate out;
  out.estimate = me.value;
  out.std_error = me.std_error;
  out.density_exists = me.value > 3.0 * me.std_error;
  return out;
}

SteinMatrixEstimate::SteinMatrixEstimate(const Eigen::MatrixXd& f_columns,
                                         const Eigen::MatrixXd& coupling_columns, int k)
    : d_(static_cast<int>(f_columns.cols())), reg_(f_columns, coupling_columns, k) {
  if (coupling_columns.cols() != static_cast<Eigen::Index>(d_) * d_)
    throw std::invalid_argument("SteinMatrixEstimate: expected d^2 coupling columns");
  if (f_columns.rows() < 1000)
    throw std::invalid_argument("SteinMatrixEstimate: need at least 1000 samples");
}

Eigen::MatrixXd SteinMatrixEstimate::evaluate(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd flat = reg_.predict(x);
  Eigen::MatrixXd out(d_, d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) out(i, j) = flat(i * d_ + j);
  return out;
}

Eigen::MatrixXd SteinMatrixEstimate::column_means() const {
  const Eigen::VectorXd flat = reg_.in_sample_predictions().colwise().mean();
  Eigen::MatrixXd out(d_, d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) out(i, j) = flat(i * d_ + j);
  return out;
}

double SteinMatrixEstimate::in_sample_residual_rms() const { return reg_.in_sample_residual_rms(); }

SteinMatrixEstimate stein_matrix_regress(const Eigen::MatrixXd& f_columns,
                                         const Eigen::MatrixXd& coupling_columns, int k) {
  return SteinMatrixEstimate(f_columns, coupling_columns, k);
}

}  // namespace chaosent

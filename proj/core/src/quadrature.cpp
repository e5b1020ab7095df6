#include "chaosent/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chaosent {

std::vector<QuadNode> gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  std::vector<QuadNode> nodes(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int half_count = (n + 1) / 2;
  for (int i = 0; i < half_count; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    nodes[i] = {mid - half * z, half * w};
    nodes[n - 1 - i] = {mid + half * z, half * w};
  }
  return nodes;
}

std::vector<QuadNode> gauss_hermite_phi(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_phi: need n >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double off = std::sqrt(static_cast<double>(i));
    jacobi(i, i - 1) = off;
    jacobi(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);

  // polish the eigenvalue nodes by Newton on He_n, then recompute weights
  // from the orthonormal Christoffel identity w = 1 / sum_k He_k(x)^2 / k!
  auto he_pair = [n](double x) {
    double prev = 1.0, cur = x;
    for (int k = 1; k < n; ++k) {
      const double next = x * cur - static_cast<double>(k) * prev;
      prev = cur;
      cur = next;
    }
    return std::pair{cur, static_cast<double>(n) * prev};  // He_n, He_n' = n He_{n-1}
  };
  std::vector<QuadNode> nodes(n);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    for (int iter = 0; iter < 8; ++iter) {
      const auto [h, dh] = he_pair(x);
      const double dx = h / dh;
      x -= dx;
      if (std::abs(dx) < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    double denom = 0.0;
    double prev = 1.0, cur = x, fact = 1.0;
    denom += 1.0;  // k = 0
    for (int k = 1; k < n; ++k) {
      fact *= k;
      denom += cur * cur / fact;
      const double next = x * cur - static_cast<double>(k) * prev;
      prev = cur;
      cur = next;
    }
    nodes[i] = {x, 1.0 / denom};
  }
  // enforce the symmetry of the rule exactly
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (nodes[j].t - nodes[i].t);
    const double w = 0.5 * (nodes[i].w + nodes[j].w);
    nodes[i] = {-x, w};
    nodes[j] = {x, w};
  }
  if (n % 2 == 1) nodes[n / 2].t = 0.0;
  return nodes;
}

double QuadratureConfig::eps_from_delta(double delta, double eta, double alpha) {
  if (!(delta > 0.0)) return 1e-2;
  const double e = std::pow(delta, (eta + 1.0) / (alpha * eta));
  return std::clamp(e, 1e-3, 0.5);
}

std::vector<QuadNode> interpolation_nodes(const QuadratureConfig& cfg) {
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0))
    throw std::invalid_argument("interpolation_nodes: eps must lie in (0,1)");
  if (!(cfg.t_hi < 1.0 && cfg.t_hi > 1.0 - cfg.eps))
    throw std::invalid_argument("interpolation_nodes: need 1-eps < t_hi < 1");
  std::vector<QuadNode> out;
  out.reserve(cfg.core_nodes + cfg.edge_nodes);
  for (const auto& nd : gauss_legendre(cfg.core_nodes, 0.0, 1.0 - cfg.eps)) out.push_back(nd);
  // edge panel in s = log(1-t): t = 1-e^s, dt = -e^s ds
  const double s_lo = std::log(1.0 - cfg.t_hi);
  const double s_hi = std::log(cfg.eps);
  for (const auto& nd : gauss_legendre(cfg.edge_nodes, s_lo, s_hi)) {
    const double u = std::exp(nd.t);
    out.push_back({1.0 - u, nd.w * u});
  }
  return out;
}

}  // namespace chaosent

#pragma once

#include <optional>
#include <vector>

namespace chaosent {

struct QuadNode {
  double t = 0.0;
  double w = 0.0;
};

// Gauss-Legendre nodes and weights on [a, b] (Newton iteration on P_n).
std::vector<QuadNode> gauss_legendre(int n, double a, double b);

// Gauss-Hermite nodes and weights against the standard Gaussian density
// (Golub-Welsch on the probabilists' Jacobi matrix); weights sum to 1.
std::vector<QuadNode> gauss_hermite_phi(int n);

// Node layout for integrals over the interpolation time t in (0, 1) whose
// integrand carries the non-integrable t/(1-t) weight: a core Gauss-Legendre
// panel on [0, 1-eps] and an edge panel on [1-eps, t_hi] placed in
// s = log(1-t) coordinates, where the integrand is flat. The residual
// (t_hi, 1) is not integrated; callers bound it and widen their error bar.
struct QuadratureConfig {
  int core_nodes = 16;
  int edge_nodes = 8;
  double eps = 1e-2;       // split point 1 - eps
  double t_hi = 1.0 - 1e-4;
  // exponents for the residual envelope (decay (1-t)^(alpha*eta/(eta+1)) of
  // the conditional second moment)
  double eta = 2.0;
  double alpha = 0.5;

  // Split choice eps = Delta^((eta+1)/(alpha eta)), clamped to [1e-3, 0.5].
  static double eps_from_delta(double delta, double eta, double alpha);
};

std::vector<QuadNode> interpolation_nodes(const QuadratureConfig& cfg);

}  // namespace chaosent

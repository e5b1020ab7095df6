#pragma once

// Test-side oracles, independent of the library code paths they check:
// composite quadrature, exact densities for the chi-square-type benchmark
// (G^2 - 1)/sqrt(2), two-Gaussian total variation, finite differences.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "chaosent/quadrature.hpp"

namespace oracles {

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int panels = 64, int order = 12) {
  const auto base = chaosent::gauss_legendre(order, 0.0, 1.0);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (const auto& nd : base) total += h * nd.w * f(lo + nd.t * h);
  }
  return total;
}

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

inline double phi_var(double x, double var) {
  return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

// Density of V = (G^2 - 1)/sqrt(2): f_V(v) = sqrt(2) f_chi2(1 + sqrt(2) v).
inline double h2_density(double v) {
  const double x = 1.0 + std::numbers::sqrt2 * v;
  if (x <= 0.0) return 0.0;
  return std::numbers::sqrt2 * std::exp(-0.5 * x) / std::sqrt(2.0 * std::numbers::pi * x);
}

// D(V || Z) for V = (G^2-1)/sqrt(2), via E_G[log f_V(V(G)) - log phi(V(G))]
// with analytic log densities (log f_V(v(g)) carries a log|g| singularity at
// zero, handled by the substitution g = e^s). Closed form for comparison:
// Ent(Z) - Ent(chi2_1) + log sqrt(2) = 0.98175...
inline double h2_relative_entropy() {
  auto by_log = [](double s) {
    const double g = std::exp(s);
    const double g2 = g * g;
    const double v = (g2 - 1.0) / std::numbers::sqrt2;
    // log f_V(v) = log sqrt(2) - log sqrt(2 pi g^2) - g^2/2, with x = g^2
    const double log_fv =
        0.5 * std::log(2.0) - 0.5 * std::log(2.0 * std::numbers::pi) - s - 0.5 * g2;
    const double log_phi_v = -0.5 * v * v - 0.5 * std::log(2.0 * std::numbers::pi);
    return phi(g) * (log_fv - log_phi_v) * g;  // times g: Jacobian of g = e^s
  };
  return 2.0 * integrate(by_log, -40.0, std::log(36.0), 256, 12);
}

// Exact smoothed density of F_t at y for F = (G^2-1)/sqrt(2):
// f_t(y) = E_G[ phi((y - sqrt(t) V(G)) / sqrt(1-t)) ] / sqrt(1-t).
inline double h2_smoothed_density(double y, double t) {
  const double s = std::sqrt(1.0 - t);
  auto f = [&](double g) {
    const double v = (g * g - 1.0) / std::numbers::sqrt2;
    return phi(g) * phi((y - std::sqrt(t) * v) / s) / s;
  };
  return integrate(f, -12.0, 12.0, 128, 12);
}

// D(F_t || Z) for the same benchmark, by double quadrature.
inline double h2_smoothed_relative_entropy(double t) {
  auto f = [&](double y) {
    const double ft = h2_smoothed_density(y, t);
    if (ft <= 0.0) return 0.0;
    return ft * (std::log(ft) - std::log(phi(y)));
  };
  return integrate(f, -14.0, 14.0, 200, 8);
}

// TV(N(mu1, var1), N(0, var2)) in the half-L1 normalization.
inline double gaussian_tv(double mu1, double var1, double var2) {
  auto f = [&](double x) { return std::abs(phi_var(x - mu1, var1) - phi_var(x, var2)); };
  const double spread = 8.0 * std::sqrt(std::max(var1, var2)) + std::abs(mu1);
  return 0.5 * integrate(f, -spread, spread, 256, 12);
}

// E|1 - G^2| by quadrature, panels split at the kinks x = +-1.
inline double abs_one_minus_chisq() {
  auto f = [](double x) { return std::abs(1.0 - x * x) * phi(x); };
  return integrate(f, -12.0, -1.0, 64, 12) + integrate(f, -1.0, 1.0, 32, 12) +
         integrate(f, 1.0, 12.0, 64, 12);
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracles

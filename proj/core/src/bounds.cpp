#include "chaosent/bounds.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chaosent/knn.hpp"
#include "chaosent/rng.hpp"
#include "chaosent/stats.hpp"

namespace chaosent {

namespace {

double xlogx_abs(double x) { return x > 0.0 ? x * std::abs(std::log(x)) : 0.0; }

// Acklam's rational approximation of the standard normal quantile.
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p outside (0,1)");
  const double plow = 0.02425;
  double q, r, x;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    q = p - 0.5;
    r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  return x;
}

}  // namespace

DeltaPair delta_fourth(const ChaoticVector& vec, int order_cap) {
  if (!vec.pure_chaos() || !vec.centered())
    throw std::invalid_argument("delta_fourth: components must be centered pure chaoses");
  const int d = vec.dim();
  const Eigen::MatrixXd& C = vec.covariance();

  DeltaPair out;
  const double gauss4 = C.trace() * C.trace() + 2.0 * C.squaredNorm();
  out.moment_form = expected_norm4(vec, order_cap) - gauss4;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      out.covariance_form += covariance_of_squares(vec, j, k, order_cap) - 2.0 * C(j, k) * C(j, k);
  return out;
}

double stein_discrepancy(const ChaoticVector& vec, const ElementMatrix& coupling) {
  const int d = vec.dim();
  const Eigen::MatrixXd& C = vec.covariance();
  double s = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      ChaosElement dev = ChaosElement::constant(vec.basis_dim(), C(j, k)) - coupling[j][k];
      s += inner_moment(dev, dev);  // E[(C - tau)^2], exact
    }
  return s;
}

double stein_tv_bound(double l1_discrepancy) {
  if (l1_discrepancy < 0.0) throw std::invalid_argument("stein_tv_bound: negative E|1 - tau|");
  return 2.0 * l1_discrepancy;
}

double BoundInputs::gate_multi_threshold() const {
  return std::pow(2.0, -(eta + 1.0) / (alpha * eta));
}

namespace {

void validate_bound_inputs(const BoundInputs& in) {
  if (!(in.eta > 0.0)) throw std::invalid_argument("bound inputs: eta must be > 0");
  if (!(in.alpha > 0.0 && in.alpha <= 0.5))
    throw std::invalid_argument("bound inputs: alpha must lie in (0, 1/2]");
  if (!(in.kappa > 0.0)) throw std::invalid_argument("bound inputs: kappa must be > 0");
  if (!(in.delta >= 0.0)) throw std::invalid_argument("bound inputs: delta must be >= 0");
  if (!in.tau_abs_moments.allFinite())
    throw std::invalid_argument("bound inputs: tau moments must be finite");
}

}  // namespace

double bound_entropy_1d(const BoundInputs& in) {
  validate_bound_inputs(in);
  if (in.C.size() != 1 || std::abs(in.C(0, 0) - 1.0) > 1e-9)
    throw std::invalid_argument("bound_entropy_1d: requires standardized F (C = 1)");
  if (!in.gate_1d())
    throw std::invalid_argument("bound_entropy_1d: hypothesis violated (Delta > 1)");
  if (in.delta == 0.0) return 0.0;

  const double eta = in.eta;
  const double z_moment = gaussian_abs_moment(eta + 2.0);
  const double tau_moment = in.tau_abs_moments(0, 0);
  const double c_eta = 2.0 * std::pow(4.0 * in.kappa + 4.0, eta / (eta + 1.0)) *
                       std::pow(z_moment, 1.0 / (eta + 1.0)) *
                       std::pow(1.0 + tau_moment, 1.0 / (eta + 1.0));
  const double lead = (eta + 1.0) / (std::min(1.0, 2.0 * in.alpha) * eta);
  return lead * xlogx_abs(in.delta) + c_eta * lead * in.delta;
}

double bound_entropy_multi(const BoundInputs& in, int d) {
  validate_bound_inputs(in);
  if (d < 1) throw std::invalid_argument("bound_entropy_multi: d must be >= 1");
  if (in.C.rows() != d || in.C.cols() != d ||
      in.tau_abs_moments.rows() != d || in.tau_abs_moments.cols() != d)
    throw std::invalid_argument("bound_entropy_multi: matrix shapes must be d x d");
  // scalar inputs: the sharper one-dimensional constant applies
  if (d == 1) return bound_entropy_1d(in);
  if (!in.gate_multi())
    throw std::invalid_argument("bound_entropy_multi: hypothesis violated (Delta above gate)");
  if (in.delta == 0.0) return 0.0;

  const double eta = in.eta;
  Eigen::LLT<Eigen::MatrixXd> llt(in.C);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("bound_entropy_multi: C is not positive definite");
  const Eigen::MatrixXd c_inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(in.C);
  const double lmax_cinv = 1.0 / es.eigenvalues().minCoeff();

  // max_l E[(Z~_l)^2] and max_l E|Z~_l|^(eta+2), Z~ = C^{-1} Z ~ N(0, C^{-1})
  double max_var = 0.0, max_abs = 0.0;
  for (int l = 0; l < d; ++l) {
    max_var = std::max(max_var, c_inv(l, l));
    max_abs = std::max(max_abs, gaussian_abs_moment(eta + 2.0, c_inv(l, l)));
  }

  // E[||Z||_1 (1 + ||Z||_1)]: closed form for diagonal C, else Monte Carlo
  double l1_moment;
  bool diagonal = true;
  for (int i = 0; i < d && diagonal; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && in.C(i, j) != 0.0) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    double e1 = 0.0, e2 = 0.0;
    for (int j = 0; j < d; ++j) {
      e1 += gaussian_abs_moment(1.0, in.C(j, j));
      e2 += in.C(j, j);
    }
    double cross = 0.0;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (j != k)
          cross += gaussian_abs_moment(1.0, in.C(j, j)) * gaussian_abs_moment(1.0, in.C(k, k));
    l1_moment = e1 + e2 + cross;
  } else {
    const Eigen::MatrixXd chol = cholesky_lower(in.C);
    const Eigen::MatrixXd z = GaussianStream(0x5EEDull, 3).matrix(200000, d) * chol.transpose();
    double acc = 0.0;
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      const double l1 = z.row(r).cwiseAbs().sum();
      acc += l1 * (1.0 + l1);
    }
    l1_moment = acc / static_cast<double>(z.rows());
  }

  double tau_sum = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      tau_sum += std::pow(std::pow(std::abs(in.C(j, k)), eta + 2.0) + in.tau_abs_moments(j, k),
                          1.0 / (eta + 1.0));

  const double c_deta = 2.0 * d * d *
                        (2.0 * in.kappa * l1_moment + std::sqrt(in.C.diagonal().maxCoeff())) *
                        std::pow(max_abs, 1.0 / (eta + 1.0)) * tau_sum;

  const double lead = (eta + 1.0) * lmax_cinv / (2.0 * in.alpha * eta);
  return d * lead * max_var * xlogx_abs(in.delta) + c_deta * lead * in.delta;
}

BaseDensity uniform_base() {
  const double a = std::sqrt(3.0);
  BaseDensity b;
  b.name = "uniform";
  b.lo = -a;
  b.hi = a;
  b.pdf = [a](double x) { return (x >= -a && x <= a) ? 1.0 / (2.0 * a) : 0.0; };
  b.quantile = [a](double u) { return a * (2.0 * u - 1.0); };
  return b;
}

BaseDensity gaussian_base() {
  BaseDensity b;
  b.name = "gaussian";
  b.lo = -8.0;
  b.hi = 8.0;
  b.pdf = [](double x) { return normal_pdf(x); };
  b.quantile = [](double u) { return normal_quantile(u); };
  return b;
}

SumExampleResult sum_example(const BaseDensity& base, int n, Eigen::Index mc_samples,
                             std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sum_example: n must be >= 1");
  constexpr int kGrid = 4001;
  const double lo = base.lo, hi = base.hi;
  const double h = (hi - lo) / (kGrid - 1);

  SumExampleResult out;
  out.grid.resize(kGrid);
  out.tau.resize(kGrid);
  std::vector<double> f(kGrid), zf(kGrid);
  for (int g = 0; g < kGrid; ++g) {
    out.grid[g] = lo + g * h;
    f[g] = base.pdf(out.grid[g]);
    zf[g] = out.grid[g] * f[g];
  }
  // tail integrals int_x^hi z f(z) dz, cumulative Simpson from the top
  std::vector<double> tail(kGrid, 0.0);
  for (int g = kGrid - 3; g >= 0; g -= 2)
    tail[g] = tail[g + 2] + h / 3.0 * (zf[g] + 4.0 * zf[g + 1] + zf[g + 2]);
  for (int g = kGrid - 2; g >= 0; g -= 2)
    tail[g] = tail[g + 1] + h / 2.0 * (zf[g] + zf[g + 1]);

  double mean_tau = 0.0, second_tau = 0.0;
  for (int g = 0; g < kGrid; ++g) {
    out.tau[g] = f[g] > 0.0 ? tail[g] / f[g] : 0.0;
    if (!std::isfinite(out.tau[g]))
      throw std::runtime_error("sum_example: tau_F is not finite on the support");
    const double w = (g == 0 || g == kGrid - 1) ? 0.5 : 1.0;  // trapezoid
    mean_tau += w * out.tau[g] * f[g] * h;
    second_tau += w * out.tau[g] * out.tau[g] * f[g] * h;
  }
  out.tau_mean_check = mean_tau;
  out.var_tau = second_tau - mean_tau * mean_tau;
  if (!std::isfinite(out.var_tau) || out.var_tau > 1e6)
    throw std::runtime_error("sum_example: Var(tau_F(F)) is not finite");
  out.tv_bound = 2.0 * std::sqrt(std::max(0.0, out.var_tau)) / std::sqrt(static_cast<double>(n));
  out.projection_rhs = out.var_tau / static_cast<double>(n);

  // Monte Carlo check of the projection identity via regression on S_n
  auto tau_interp = [&](double x) {
    if (x <= lo) return out.tau.front();
    if (x >= hi) return out.tau.back();
    const double pos = (x - lo) / h;
    const int g = std::min(static_cast<int>(pos), kGrid - 2);
    const double frac = pos - g;
    return (1.0 - frac) * out.tau[g] + frac * out.tau[g + 1];
  };

  UniformStream ustream(mix_seed(seed, 0x5D), 7);
  Eigen::MatrixXd s(mc_samples, 1);
  Eigen::MatrixXd avg_tau(mc_samples, 1);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index r = 0; r < mc_samples; ++r) {
    double sum = 0.0, tsum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = ustream.uniform(static_cast<std::uint64_t>(r), static_cast<std::uint32_t>(i));
      const double x = base.quantile(u);
      sum += x;
      tsum += tau_interp(x);
    }
    s(r, 0) = sum * inv_sqrt_n;
    avg_tau(r, 0) = tsum / static_cast<double>(n);
  }

  if (out.var_tau < 1e-12) {
    // tau is constant (Gaussian base): conditional expectation is exact
    out.projection_lhs = 0.0;
    out.projection_lhs_err = 0.0;
    return out;
  }
  KnnRegressor reg(s, avg_tau);
  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  Eigen::VectorXd center = Eigen::VectorXd::Ones(1);
  const ValueWithError lhs = reg.quadratic_form(one, center);
  out.projection_lhs = lhs.value;
  out.projection_lhs_err = lhs.std_error;
  return out;
}

SmallBallFit carbery_wright_envelope(std::span<const double> q_samples, int degree,
                                     double normalizer) {
  if (degree < 1) throw std::invalid_argument("carbery_wright_envelope: degree must be >= 1");
  if (!(normalizer > 0.0))
    throw std::invalid_argument("carbery_wright_envelope: normalizer must be > 0");
  std::vector<double> abs_q(q_samples.begin(), q_samples.end());
  for (double& v : abs_q) v = std::abs(v);
  std::sort(abs_q.begin(), abs_q.end());
  const std::size_t m = abs_q.size();
  if (m < 1000) throw std::invalid_argument("carbery_wright_envelope: sample too small");
  if (abs_q.back() <= abs_q.front())
    throw std::invalid_argument("carbery_wright_envelope: Q is degenerate (a.s. constant)");

  auto quantile = [&](double p) { return abs_q[static_cast<std::size_t>(p * (m - 1))]; };
  const double a_lo = std::max(quantile(0.0005), 1e-300);
  const double a_hi = quantile(0.6);
  constexpr int kPoints = 40;

  SmallBallFit out;
  out.curve.reserve(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    const double a =
        std::exp(std::log(a_lo) + (std::log(a_hi) - std::log(a_lo)) * i / (kPoints - 1));
    const auto rank = std::upper_bound(abs_q.begin(), abs_q.end(), a) - abs_q.begin();
    const double p = static_cast<double>(rank) / static_cast<double>(m);
    if (p > 0.0) out.curve.emplace_back(a, p);
  }

  // free slope over the small-ball range P in [0.005, 0.3]
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int cnt = 0;
  for (const auto& [a, p] : out.curve) {
    if (p < 0.005 || p > 0.3) continue;
    const double lx = std::log(a);
    const double ly = std::log(p);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  out.exponent_fit = cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;

  // envelope constant calibrated where the curve is well resolved (P >= 0.1),
  // then domination checked over the whole grid including the far tail, with
  // an allowance for the binomial noise of small-ball counts
  const double inv_deg = 1.0 / static_cast<double>(degree);
  double c = 0.0;
  for (const auto& [a, p] : out.curve)
    if (p >= 0.1) c = std::max(c, p / (degree * std::pow(a / normalizer, inv_deg)));
  out.c_fit = c;
  out.envelope_pass = c > 0.0;
  for (const auto& [a, p] : out.curve) {
    const double margin = 1.05 + 3.0 / std::sqrt(static_cast<double>(m) * p);
    if (p > margin * c * degree * std::pow(a / normalizer, inv_deg)) out.envelope_pass = false;
  }
  return out;
}

double tv_shift_estimate(const Eigen::MatrixXd& f_samples, const Eigen::VectorXd& x, double t,
                         double bandwidth) {
  const int d = static_cast<int>(f_samples.cols());
  if (x.size() != d) throw std::invalid_argument("tv_shift_estimate: shift dimension mismatch");
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("tv_shift_estimate: t must be in (0,1]");
  if (t == 1.0) return 0.0;
  const double st = std::sqrt(t);
  const double s1 = std::sqrt(1.0 - t);
  if (d == 1) {
    std::vector<double> a(f_samples.col(0).data(), f_samples.col(0).data() + f_samples.rows());
    std::vector<double> b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) b[i] = st * a[i] + s1 * x(0);
    return tv_smoothed_two_sample_1d(a, b, bandwidth);
  }
  if (d == 2) {
    Eigen::MatrixXd b = st * f_samples;
    b.rowwise() += (s1 * x).transpose();
    return tv_smoothed_two_sample_2d(f_samples, b, bandwidth);
  }
  throw std::invalid_argument("tv_shift_estimate: density-based estimator restricted to d <= 2");
}

TvShiftFit fit_tv_shift(const Eigen::MatrixXd& f_samples,
                        std::span<const Eigen::VectorXd> shifts, std::span<const double> ts,
                        double bandwidth) {
  TvShiftFit fit;
  std::vector<double> log1mt, logratio;  // log(tv / (1 + ||x||_1))
  std::vector<std::pair<double, double>> pts;  // (1 + ||x||_1)(1-t) keyed ratios
  for (const Eigen::VectorXd& x : shifts) {
    const double amp = 1.0 + x.cwiseAbs().sum();
    for (double t : ts) {
      const double tv = tv_shift_estimate(f_samples, x, t, bandwidth);
      ++fit.grid_points;
      if (t >= 1.0 || tv <= 0.0) continue;
      log1mt.push_back(std::log(1.0 - t));
      logratio.push_back(std::log(tv / amp));
      pts.emplace_back(1.0 - t, tv / amp);
    }
  }
  if (log1mt.size() < 2) {
    fit.alpha = 0.5;
    fit.kappa = 1.0;
    fit.envelope_holds = true;
    return fit;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double cnt = static_cast<double>(log1mt.size());
  for (std::size_t i = 0; i < log1mt.size(); ++i) {
    sx += log1mt[i];
    sy += logratio[i];
    sxx += log1mt[i] * log1mt[i];
    sxy += log1mt[i] * logratio[i];
  }
  fit.alpha = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  double kappa = 0.0;
  for (const auto& [u, ratio] : pts) kappa = std::max(kappa, ratio / std::pow(u, fit.alpha));
  fit.kappa = kappa;
  fit.envelope_holds = fit.alpha > 0.0;
  return fit;
}

}  // namespace chaosent

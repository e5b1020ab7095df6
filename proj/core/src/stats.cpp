#include "chaosent/stats.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace chaosent {

namespace {

// KDE with Gaussian kernel on a uniform grid, sliding-window over sorted
// samples (kernel truncated at 8h).
std::vector<double> kde_on_grid(std::span<const double> sorted, double h, double lo, double step,
                                int npts) {
  std::vector<double> out(npts, 0.0);
  const double cut = 8.0 * h;
  const double inv = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi) * sorted.size());
  std::size_t begin = 0, end = 0;
  for (int g = 0; g < npts; ++g) {
    const double xg = lo + g * step;
    while (begin < sorted.size() && sorted[begin] < xg - cut) ++begin;
    if (end < begin) end = begin;
    while (end < sorted.size() && sorted[end] <= xg + cut) ++end;
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double u = (xg - sorted[i]) / h;
      s += std::exp(-0.5 * u * u);
    }
    out[g] = s * inv;
  }
  return out;
}

}  // namespace

ValueWithError mean_with_error(std::span<const double> xs) {
  if (xs.empty()) return {};
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double v : xs) var += (v - mean) * (v - mean);
  var /= std::max<double>(1.0, static_cast<double>(xs.size()) - 1.0);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gaussian_abs_moment(double p, double sigma2) {
  if (p <= 0.0) throw std::invalid_argument("gaussian_abs_moment: p must be > 0");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("gaussian_abs_moment: sigma2 must be > 0");
  return std::pow(sigma2, p / 2.0) * std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) /
         std::sqrt(std::numbers::pi);
}

double ks_statistic_gaussian(std::span<const double> samples) {
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = normal_cdf(xs[i]);
    ks = std::max(ks, std::abs((i + 1) / n - cdf));
    ks = std::max(ks, std::abs(i / n - cdf));
  }
  return ks;
}

double silverman_bandwidth(std::span<const double> samples) {
  const auto me = mean_with_error(samples);
  const double sd = me.std_error * std::sqrt(static_cast<double>(samples.size()));
  return 0.9 * sd * std::pow(static_cast<double>(samples.size()), -0.2);
}

double tv_smoothed_vs_gaussian_1d(std::span<const double> samples, double gaussian_variance,
                                  double bandwidth) {
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(xs);
  // the smoothed reference law is exactly N(0, var + h^2)
  const double ref_sd = std::sqrt(gaussian_variance + h * h);
  const double lo = std::min(xs.front(), -8.0 * ref_sd) - 8.0 * h;
  const double hi = std::max(xs.back(), 8.0 * ref_sd) + 8.0 * h;
  const double step = h / 3.0;
  const int npts = static_cast<int>((hi - lo) / step) + 2;
  const auto f = kde_on_grid(xs, h, lo, step, npts);
  double l1 = 0.0;
  for (int g = 0; g < npts; ++g) {
    const double xg = lo + g * step;
    l1 += std::abs(f[g] - normal_pdf(xg / ref_sd) / ref_sd);
  }
  return 0.5 * l1 * step;
}

double tv_smoothed_two_sample_1d(std::span<const double> a, std::span<const double> b,
                                 double bandwidth) {
  std::vector<double> xa(a.begin(), a.end());
  std::vector<double> xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(xa);
  const double lo = std::min(xa.front(), xb.front()) - 8.0 * h;
  const double hi = std::max(xa.back(), xb.back()) + 8.0 * h;
  const double step = h / 3.0;
  const int npts = static_cast<int>((hi - lo) / step) + 2;
  const auto fa = kde_on_grid(xa, h, lo, step, npts);
  const auto fb = kde_on_grid(xb, h, lo, step, npts);
  double l1 = 0.0;
  for (int g = 0; g < npts; ++g) l1 += std::abs(fa[g] - fb[g]);
  return 0.5 * l1 * step;
}

double tv_smoothed_two_sample_2d(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                 double bandwidth, int grid) {
  if (a.cols() != 2 || b.cols() != 2)
    throw std::invalid_argument("tv_smoothed_two_sample_2d: expected 2 columns");
  double h = bandwidth;
  if (h <= 0.0) {
    std::vector<double> c0(a.col(0).data(), a.col(0).data() + a.rows());
    h = std::max(1e-3, silverman_bandwidth(c0));
  }
  const double lo_x = std::min(a.col(0).minCoeff(), b.col(0).minCoeff()) - 4.0 * h;
  const double hi_x = std::max(a.col(0).maxCoeff(), b.col(0).maxCoeff()) + 4.0 * h;
  const double lo_y = std::min(a.col(1).minCoeff(), b.col(1).minCoeff()) - 4.0 * h;
  const double hi_y = std::max(a.col(1).maxCoeff(), b.col(1).maxCoeff()) + 4.0 * h;
  const double sx = (hi_x - lo_x) / (grid - 1);
  const double sy = (hi_y - lo_y) / (grid - 1);

  auto density = [&](const Eigen::MatrixXd& pts, double x, double y) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const double dx = (x - pts(i, 0)) / h;
      const double dy = (y - pts(i, 1)) / h;
      const double r2 = dx * dx + dy * dy;
      if (r2 < 64.0) s += std::exp(-0.5 * r2);
    }
    return s / (2.0 * std::numbers::pi * h * h * pts.rows());
  };

  double l1 = 0.0;
  for (int gx = 0; gx < grid; ++gx)
    for (int gy = 0; gy < grid; ++gy) {
      const double x = lo_x + gx * sx;
      const double y = lo_y + gy * sy;
      l1 += std::abs(density(a, x, y) - density(b, x, y));
    }
  return 0.5 * l1 * sx * sy;
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& c) {
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("cholesky_lower: matrix is not positive definite");
  return llt.matrixL();
}

}  // namespace chaosent

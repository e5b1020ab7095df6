#include "chaosent/interpolation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "chaosent/rng.hpp"
#include "chaosent/stats.hpp"

namespace chaosent {

InterpolationPoint make_interpolation(const Eigen::MatrixXd& f_samples, const Eigen::MatrixXd& B,
                                      const Eigen::MatrixXd& C, double t, std::uint64_t z_seed) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("make_interpolation: t must be in [0,1]");
  const int d = static_cast<int>(f_samples.cols());
  if (C.rows() != d || C.cols() != d || B.rows() != d || B.cols() != d)
    throw std::invalid_argument("make_interpolation: covariance shape mismatch");
  InterpolationPoint pt;
  pt.t = t;
  pt.f_samples = f_samples;
  pt.b = B;
  pt.c = C;
  const Eigen::MatrixXd chol = cholesky_lower(C);
  pt.z_samples = GaussianStream(z_seed, 1).matrix(f_samples.rows(), d) * chol.transpose();
  pt.combined = std::sqrt(t) * pt.f_samples + std::sqrt(1.0 - t) * pt.z_samples;
  return pt;
}

namespace {

struct MixtureKernel {
  Eigen::MatrixXd cov_inv;
  double log_norm = 0.0;  // -d/2 log(2 pi) - 1/2 log det((1-t)C)
  double sqrt_t = 0.0;
  double scale = 0.0;  // 1-t

  explicit MixtureKernel(const InterpolationPoint& pt) {
    if (pt.t >= 1.0)
      throw std::invalid_argument("smoothed density: t = 1 has no smoothing");
    if (pt.dim() > 3)
      throw std::invalid_argument("smoothed density: density route restricted to d <= 3");
    scale = 1.0 - pt.t;
    sqrt_t = std::sqrt(pt.t);
    const Eigen::MatrixXd cov = scale * pt.c;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("smoothed density: (1-t)C is not positive definite");
    cov_inv = llt.solve(Eigen::MatrixXd::Identity(pt.dim(), pt.dim()));
    double logdet = 0.0;
    const Eigen::MatrixXd L = llt.matrixL();
    for (int i = 0; i < pt.dim(); ++i) logdet += 2.0 * std::log(L(i, i));
    log_norm = -0.5 * pt.dim() * std::log(2.0 * std::numbers::pi) - 0.5 * logdet;
  }

  double density(const Eigen::VectorXd& dev) const {
    return std::exp(log_norm - 0.5 * dev.dot(cov_inv * dev));
  }
};

}  // namespace

namespace {

// Two-pass mixture accumulation, rescaled by the dominant kernel exponent so
// that squares of deep-tail kernel values do not underflow to zero (which
// would fake a zero standard error and defeat the bulk rule).
struct MixtureSums {
  double log_scale = 0.0;              // kernels are exp(log_scale) * scaled values
  double fsum = 0.0, fsq = 0.0;        // scaled
  Eigen::VectorXd gsum, gsq, fg;       // scaled gradient sums
  bool empty = true;

  MixtureSums(const MixtureKernel& kernel, const InterpolationPoint& pt,
              const Eigen::VectorXd& x) {
    const Eigen::Index m = pt.rows();
    const int d = pt.dim();
    Eigen::VectorXd exponents(m);
    double max_e = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::VectorXd dev = x - kernel.sqrt_t * pt.f_samples.row(i).transpose();
      exponents(i) = kernel.log_norm - 0.5 * dev.dot(kernel.cov_inv * dev);
      max_e = std::max(max_e, exponents(i));
    }
    gsum = Eigen::VectorXd::Zero(d);
    gsq = Eigen::VectorXd::Zero(d);
    fg = Eigen::VectorXd::Zero(d);
    if (!std::isfinite(max_e)) return;
    empty = false;
    log_scale = max_e;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double k = std::exp(exponents(i) - max_e);
      if (k == 0.0) continue;
      const Eigen::VectorXd dev = x - kernel.sqrt_t * pt.f_samples.row(i).transpose();
      const Eigen::VectorXd g = -k * (kernel.cov_inv * dev);
      fsum += k;
      fsq += k * k;
      gsum += g;
      gsq += g.cwiseProduct(g);
      fg += k * g;
    }
  }
};

}  // namespace

ValueWithError smoothed_density(const InterpolationPoint& pt, const Eigen::VectorXd& x) {
  const MixtureKernel kernel(pt);
  const MixtureSums sums(kernel, pt, x);
  const double md = static_cast<double>(pt.rows());
  if (sums.empty) return {0.0, 0.0};
  const double scale = std::exp(sums.log_scale);
  const double mean = sums.fsum / md;
  const double var = (sums.fsq / md - mean * mean) / std::max(1.0, md - 1.0);
  return {scale * mean, scale * std::sqrt(std::max(0.0, var))};
}

DensityScoreDetail density_score_detail(const InterpolationPoint& pt, const Eigen::VectorXd& x) {
  const MixtureKernel kernel(pt);
  const MixtureSums sums(kernel, pt, x);
  const int d = pt.dim();
  const double md = static_cast<double>(pt.rows());

  DensityScoreDetail out;
  out.score = Eigen::VectorXd::Zero(d);
  out.score_err = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
  if (sums.empty || sums.fsum <= 0.0) return out;  // bulk stays false

  const double scale = std::exp(sums.log_scale);
  const double mean = sums.fsum / md;  // scaled density
  const double var_f = (sums.fsq / md - mean * mean) / std::max(1.0, md - 1.0);
  out.density = scale * mean;
  out.density_err = scale * std::sqrt(std::max(0.0, var_f));
  // scale-free bulk rule: relative standard error below 10%
  out.bulk = mean > 10.0 * std::sqrt(std::max(0.0, var_f)) && out.density > 0.0;
  out.score = sums.gsum / sums.fsum;
  for (int j = 0; j < d; ++j) {
    const double gm = sums.gsum(j) / md;
    const double var_g = (sums.gsq(j) / md - gm * gm) / std::max(1.0, md - 1.0);
    const double cov_fg = (sums.fg(j) / md - mean * gm) / std::max(1.0, md - 1.0);
    // delta method for the ratio g/f (all scaled quantities: the scale cancels)
    const double f2 = mean * mean;
    const double var_ratio =
        var_g / f2 + gm * gm * var_f / (f2 * f2) - 2.0 * gm * cov_fg / (f2 * mean);
    out.score_err(j) = std::sqrt(std::max(0.0, var_ratio));
  }
  return out;
}

Eigen::VectorXd score_density_route(const InterpolationPoint& pt, const Eigen::VectorXd& x) {
  const DensityScoreDetail detail = density_score_detail(pt, x);
  if (!detail.bulk)
    throw std::runtime_error(
        "score_density_route: unreliable region (density indistinguishable from 0)");
  return detail.score;
}

SteinScore::SteinScore(const InterpolationPoint& pt, const Eigen::MatrixXd& coupling, int k)
    : t_(pt.t), combined_(pt.combined) {
  const int d = pt.dim();
  if (!(t_ > 0.0 && t_ < 1.0))
    throw std::invalid_argument("SteinScore: needs 0 < t < 1");
  if (coupling.rows() != pt.rows() || coupling.cols() != static_cast<Eigen::Index>(d) * d)
    throw std::invalid_argument("SteinScore: coupling must be m x d^2 on the same batch");
  pref_ = -t_ / std::sqrt(1.0 - t_);
  c_inv_ = pt.c.llt().solve(Eigen::MatrixXd::Identity(d, d));
  gamma_t_ = pt.gamma_t();
  gamma_t_inv_ = gamma_t_.llt().solve(Eigen::MatrixXd::Identity(d, d));

  // response (I - C^{-1} tau(F)) C^{-1} Z per sample
  const Eigen::Index m = pt.rows();
  Eigen::MatrixXd response(m, d);
  Eigen::MatrixXd tau(d, d);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) tau(i, j) = coupling(r, i * d + j);
    const Eigen::VectorXd zt = c_inv_ * pt.z_samples.row(r).transpose();
    response.row(r) =
        ((Eigen::MatrixXd::Identity(d, d) - c_inv_ * tau) * zt).transpose();
  }
  reg_ = std::make_unique<KnnRegressor>(pt.combined, std::move(response), k);
}

Eigen::VectorXd SteinScore::score(const Eigen::VectorXd& x) const {
  return pref_ * reg_->predict(x) - c_inv_ * x;
}

Eigen::VectorXd SteinScore::score_star(const Eigen::VectorXd& x) const {
  return gamma_t_ * score(x);
}

Eigen::MatrixXd SteinScore::scores_at_samples() const {
  const Eigen::MatrixXd& pred = reg_->in_sample_predictions();
  Eigen::MatrixXd out = pref_ * pred;
  out -= combined_ * c_inv_.transpose();
  return out;
}

ValueWithError SteinScore::v_quadratic(const Eigen::MatrixXd& weight) const {
  const Eigen::Index m = reg_->samples();
  const Eigen::Index blk = reg_->block_length();
  const Eigen::Index nblocks = std::max<Eigen::Index>(1, m / blk);
  const Eigen::MatrixXd lin = gamma_t_inv_ - c_inv_;  // linear part of V
  const double k = reg_->k();

  std::vector<double> block_sum(static_cast<std::size_t>(nblocks), 0.0);
  std::vector<Eigen::Index> block_count(static_cast<std::size_t>(nblocks), 0);
  reg_->for_each_window([&](Eigen::Index pos, Eigen::Index idx, const Eigen::VectorXd& mean,
                            const Eigen::MatrixXd& cov) {
    const auto b = static_cast<std::size_t>(std::min(pos / blk, nblocks - 1));
    const Eigen::VectorXd l = lin * combined_.row(idx).transpose();
    const Eigen::VectorXd v = pref_ * mean + l;
    block_sum[b] += v.dot(weight * v) -
                    pref_ * pref_ * (weight.cwiseProduct(cov)).sum() / k;
    block_count[b] += 1;
  });

  double total = 0.0;
  Eigen::Index count = 0;
  for (std::size_t b = 0; b < block_sum.size(); ++b) {
    total += block_sum[b];
    count += block_count[b];
  }
  ValueWithError out;
  out.value = total / static_cast<double>(count);
  if (nblocks > 1) {
    double var = 0.0;
    for (std::size_t b = 0; b < block_sum.size(); ++b) {
      const double dev = block_sum[b] / block_count[b] - out.value;
      var += dev * dev;
    }
    out.std_error = std::sqrt(var / static_cast<double>(nblocks - 1) /
                              static_cast<double>(nblocks));
  }
  return out;
}

MatrixWithError SteinScore::v_second_moment() const {
  const int d = static_cast<int>(c_inv_.rows());
  const Eigen::Index m = reg_->samples();
  const Eigen::Index blk = reg_->block_length();
  const Eigen::Index nblocks = std::max<Eigen::Index>(1, m / blk);
  const Eigen::MatrixXd lin = gamma_t_inv_ - c_inv_;
  const double k = reg_->k();

  std::vector<Eigen::MatrixXd> block_sum(static_cast<std::size_t>(nblocks),
                                         Eigen::MatrixXd::Zero(d, d));
  std::vector<Eigen::Index> block_count(static_cast<std::size_t>(nblocks), 0);
  reg_->for_each_window([&](Eigen::Index pos, Eigen::Index idx, const Eigen::VectorXd& mean,
                            const Eigen::MatrixXd& cov) {
    const auto b = static_cast<std::size_t>(std::min(pos / blk, nblocks - 1));
    const Eigen::VectorXd l = lin * combined_.row(idx).transpose();
    const Eigen::VectorXd v = pref_ * mean + l;
    block_sum[b] += v * v.transpose() - (pref_ * pref_ / k) * cov;
    block_count[b] += 1;
  });

  MatrixWithError out;
  out.value.setZero(d, d);
  Eigen::Index count = 0;
  for (std::size_t b = 0; b < block_sum.size(); ++b) {
    out.value += block_sum[b];
    count += block_count[b];
  }
  out.value /= static_cast<double>(count);
  out.std_error.setZero(d, d);
  if (nblocks > 1) {
    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t b = 0; b < block_sum.size(); ++b) {
      const Eigen::MatrixXd dev = block_sum[b] / block_count[b] - out.value;
      var += dev.cwiseProduct(dev);
    }
    out.std_error = (var / static_cast<double>(nblocks - 1) /
                     static_cast<double>(nblocks))
                        .cwiseSqrt();
  }
  return out;
}

DualCheckResult conditional_dual_check(const Eigen::VectorXd& x, const Eigen::MatrixXd& y,
                                       std::uint64_t seed, int dictionary_size) {
  if (x.size() != y.rows())
    throw std::invalid_argument("conditional_dual_check: X/Y length mismatch");
  if (x.size() < 10000)
    throw std::invalid_argument("conditional_dual_check: needs at least 10^4 samples");
  const Eigen::Index m = y.rows();
  const int d = static_cast<int>(y.cols());

  KnnRegressor reg(y, x, 0);
  const Eigen::MatrixXd& pred = reg.in_sample_predictions();
  double lhs = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) lhs += std::abs(pred(i, 0));
  lhs /= static_cast<double>(m);

  // dictionary of tanh ridge functions, |g| <= 1
  GaussianStream dict(mix_seed(seed, 0xD1C7));
  double rhs = 0.0;
  for (int j = 0; j < dictionary_size; ++j) {
    Eigen::VectorXd w(d);
    for (int c = 0; c < d; ++c) w(c) = dict.normal(j, static_cast<std::uint32_t>(c));
    const double bias = dict.normal(j, static_cast<std::uint32_t>(d));
    double s = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      s += x(i) * std::tanh(y.row(i).dot(w) + bias);
    rhs = std::max(rhs, s / static_cast<double>(m));
  }
  return {lhs, rhs, lhs - rhs};
}

}  // namespace chaosent

#pragma once

#include <Eigen/Core>
#include <span>

#include "chaosent/knn.hpp"

namespace chaosent {

ValueWithError mean_with_error(std::span<const double> xs);

double normal_pdf(double x);
double normal_cdf(double x);

// E|Z|^p for Z ~ N(0, sigma2), p > 0: sigma^p 2^(p/2) Gamma((p+1)/2) / sqrt(pi).
double gaussian_abs_moment(double p, double sigma2 = 1.0);

// Kolmogorov-Smirnov statistic of a sample against N(0,1).
double ks_statistic_gaussian(std::span<const double> samples);

// Silverman's rule for a 1-d sample.
double silverman_bandwidth(std::span<const double> samples);

// Total variation estimates via mixture-smoothed densities at matched
// bandwidth (half-L1 normalization, TV = 1/2 ||f - g||_1). Smoothing can only
// shrink TV, so these are consistent from below as h -> 0.
double tv_smoothed_vs_gaussian_1d(std::span<const double> samples, double gaussian_variance,
                                  double bandwidth = 0.0);
double tv_smoothed_two_sample_1d(std::span<const double> a, std::span<const double> b,
                                 double bandwidth = 0.0);
double tv_smoothed_two_sample_2d(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                 double bandwidth = 0.0, int grid = 96);

// Lower-triangular Cholesky factor; throws when the matrix is not PD.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& c);

}  // namespace chaosent

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "chaosent/bounds.hpp"
#include "chaosent/entropy.hpp"

namespace chaosent {

// Flat key=value experiment description. Two runs with an equal config
// produce byte-identical CSV output.
struct ExperimentConfig {
  std::string family = "single-chaos";  // gaussian-control | single-chaos |
                                        // multi-chaos | iid-sum
  int d = 1;
  int q = 2;                  // single-chaos order
  std::vector<int> orders;    // multi-chaos orders (q1 <= ... <= qd)
  std::string profile = "flat";  // flat | geometric (non-converging control)
  double ratio = 0.75;           // geometric coefficient ratio
  std::vector<int> n_list = {1, 2, 4, 8, 16, 32, 64};
  long long samples = 100000;
  long long tv_samples = 20000;
  long long direct_samples = 20000;
  long long det_samples = 20000;
  std::uint64_t seed = 42;
  double eta = 2.0;
  double t0 = 0.995;
  int core_nodes = 16;
  int edge_nodes = 8;
  double eps = 0.0;  // 0: choose from the measured discrepancy
  std::string base = "uniform";  // iid-sum base density
  std::string out_dir = "out";

  static ExperimentConfig from_file(const std::filesystem::path& path);
  static ExperimentConfig from_string(const std::string& text);
  void set(const std::string& key, const std::string& value);
  std::string echo() const;
};

struct BenchmarkSet {
  std::vector<ChaoticVector> vectors;  // one per n for the chaotic families
  bool iid_sum = false;
};
BenchmarkSet build_benchmark(const std::string& family, const ExperimentConfig& cfg);

struct StageFailure {
  std::string stage;
  std::string message;
};

struct RoadmapRow {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  int n = 0;
  int d = 1;
  double delta_moment = kNaN, delta_cov = kNaN, discrepancy = kNaN;
  double tau_check = kNaN;       // max |E[coupling] - C|, exact
  double tau_moment_max = kNaN;  // max_jk E|tau^{jk}|^{eta+2}
  double kappa_hat = kNaN, alpha_hat = kNaN;
  bool gate_1d = false, gate_multi = false;
  double d_hat = kNaN, d_err = kNaN;
  double d_direct = kNaN, d_direct_err = kNaN;
  double a1 = kNaN, a2 = kNaN;
  double bound_1d = kNaN, bound_multi = kNaN;
  double pinsker = kNaN;
  double tv_smoothed = kNaN;
  double ks_stat = kNaN;
  double tv_assembly = kNaN;
  double e_det_gamma = kNaN, det_gamma_err = kNaN;
  bool det_verdict = false;
  double residual_envelope = kNaN, tail_beyond_t0 = kNaN;
  // iid-sum columns
  double var_tau = kNaN, sum_tv_bound = kNaN;
  double proj_lhs = kNaN, proj_lhs_err = kNaN, proj_rhs = kNaN;
  std::vector<StageFailure> failures;
};

struct RoadmapResult {
  ExperimentConfig config;
  std::vector<RoadmapRow> rows;
  std::vector<EntropyReport> reports;  // parallel to rows for chaotic families
  bool all_gates_pass = true;
};

RoadmapResult run_roadmap(const ExperimentConfig& cfg);

std::string summary_csv(const RoadmapResult& result);
// Writes summary.csv, fisher_curve_<n>.csv, score_grid_<n>.csv and
// config.echo into dir (created if absent). All floats carry 17 significant
// digits.
void emit_outputs(const RoadmapResult& result, const std::filesystem::path& dir);

// Seeded random sparse elements and vectors for randomized checks.
ChaosElement random_element(std::uint64_t seed, int basis_dim, int max_order, int terms);
ChaoticVector random_chaotic_vector(std::uint64_t seed, int d, int max_q, int basis_dim);

}  // namespace chaosent

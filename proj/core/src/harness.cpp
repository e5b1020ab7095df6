#include "chaosent/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "chaosent/rng.hpp"
#include "chaosent/stats.hpp"

namespace chaosent {

namespace {

std::string g17(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  return out;
}

std::string join_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

void strip(std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  const auto end = s.find_last_not_of(" \t\r");
  s = begin == std::string::npos ? "" : s.substr(begin, end - begin + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: malformed line (expected key=value): " + line);
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    strip(key);
    strip(value);
    cfg.set(key, value);
  }
  return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "family") family = value;
  else if (key == "d") d = std::stoi(value);
  else if (key == "q") q = std::stoi(value);
  else if (key == "orders") orders = parse_int_list(value);
  else if (key == "profile") profile = value;
  else if (key == "ratio") ratio = std::stod(value);
  else if (key == "n_list") n_list = parse_int_list(value);
  else if (key == "samples") samples = std::stoll(value);
  else if (key == "tv_samples") tv_samples = std::stoll(value);
  else if (key == "direct_samples") direct_samples = std::stoll(value);
  else if (key == "det_samples") det_samples = std::stoll(value);
  else if (key == "seed") seed = std::stoull(value);
  else if (key == "eta") eta = std::stod(value);
  else if (key == "t0") t0 = std::stod(value);
  else if (key == "core_nodes") core_nodes = std::stoi(value);
  else if (key == "edge_nodes") edge_nodes = std::stoi(value);
  else if (key == "eps") eps = std::stod(value);
  else if (key == "base") base = value;
  else if (key == "out") out_dir = value;
  else throw std::runtime_error("config: unknown key: " + key);
}

std::string ExperimentConfig::echo() const {
  std::string out;
  out += "family = " + family + "\n";
  out += "d = " + std::to_string(d) + "\n";
  out += "q = " + std::to_string(q) + "\n";
  out += "orders = " + join_int_list(orders) + "\n";
  out += "profile = " + profile + "\n";
  out += "ratio = " + g17(ratio) + "\n";
  out += "n_list = " + join_int_list(n_list) + "\n";
  out += "samples = " + std::to_string(samples) + "\n";
  out += "tv_samples = " + std::to_string(tv_samples) + "\n";
  out += "direct_samples = " + std::to_string(direct_samples) + "\n";
  out += "det_samples = " + std::to_string(det_samples) + "\n";
  out += "seed = " + std::to_string(seed) + "\n";
  out += "eta = " + g17(eta) + "\n";
  out += "t0 = " + g17(t0) + "\n";
  out += "core_nodes = " + std::to_string(core_nodes) + "\n";
  out += "edge_nodes = " + std::to_string(edge_nodes) + "\n";
  out += "eps = " + g17(eps) + "\n";
  out += "base = " + base + "\n";
  out += "out = " + out_dir + "\n";
  return out;
}

namespace {

ChaosElement flat_profile_component(int basis_dim, int offset, int n, int q, double ratio,
                                    bool geometric) {
  ChaosElement f(basis_dim);
  double norm2 = 0.0;
  std::vector<double> coeffs(static_cast<std::size_t>(n));
  double fact_q = 1.0;
  for (int j = 2; j <= q; ++j) fact_q *= j;
  for (int i = 0; i < n; ++i) {
    coeffs[static_cast<std::size_t>(i)] = geometric ? std::pow(ratio, i + 1) : 1.0;
    norm2 += coeffs[static_cast<std::size_t>(i)] * coeffs[static_cast<std::size_t>(i)] * fact_q;
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (int i = 0; i < n; ++i)
    f.add_term(MultiIndex::single(offset + i + 1, q), coeffs[static_cast<std::size_t>(i)] * scale);
  return f;
}

}  // namespace

BenchmarkSet build_benchmark(const std::string& family, const ExperimentConfig& cfg) {
  BenchmarkSet set;
  if (family == "iid-sum") {
    set.iid_sum = true;
    return set;
  }
  if (family == "gaussian-control") {
    for (int n : cfg.n_list) {
      (void)n;
      std::vector<ChaosElement> comps;
      for (int i = 0; i < cfg.d; ++i)
        comps.push_back(ChaosElement::hermite_term(cfg.d, i + 1, 1));
      set.vectors.push_back(ChaoticVector::from_components(std::move(comps)));
    }
    return set;
  }
  if (family == "single-chaos") {
    const bool geometric = cfg.profile == "geometric";
    if (!geometric && cfg.profile != "flat")
      throw std::invalid_argument("build_benchmark: unknown profile " + cfg.profile);
    for (int n : cfg.n_list) {
      std::vector<ChaosElement> comps;
      comps.push_back(flat_profile_component(n, 0, n, cfg.q, cfg.ratio, geometric));
      set.vectors.push_back(ChaoticVector::from_components(std::move(comps)));
    }
    return set;
  }
  if (family == "multi-chaos") {
    std::vector<int> orders = cfg.orders;
    if (orders.empty()) orders.assign(static_cast<std::size_t>(cfg.d), cfg.q);
    if (static_cast<int>(orders.size()) != cfg.d)
      throw std::invalid_argument("build_benchmark: orders size must equal d");
    if (!std::is_sorted(orders.begin(), orders.end()))
      throw std::invalid_argument("build_benchmark: orders must be nondecreasing");
    const bool geometric = cfg.profile == "geometric";
    for (int n : cfg.n_list) {
      const int basis_dim = cfg.d * n;
      std::vector<ChaosElement> comps;
      for (int i = 0; i < cfg.d; ++i)
        comps.push_back(flat_profile_component(basis_dim, i * n, n, orders[static_cast<std::size_t>(i)],
                                               cfg.ratio, geometric));
      set.vectors.push_back(ChaoticVector::from_components(std::move(comps)));
    }
    return set;
  }
  throw std::invalid_argument("build_benchmark: unknown family " + family);
}

namespace {

SampleBatch head_batch(const SampleBatch& batch, Eigen::Index k) {
  SampleBatch out;
  out.seed = batch.seed;
  out.gaussians = batch.gaussians.topRows(k);
  for (const auto& [name, col] : batch.evaluations) out.add_column(name, col.head(k));
  return out;
}

// E|tau|^(eta+2) per entry: exact fourth moments when eta == 2, Monte Carlo
// otherwise. Unconditioned moments dominate the conditional ones (Jensen), so
// they are valid inputs for the bound constants.
Eigen::MatrixXd tau_abs_moments(const ChaoticVector& vec, const ElementMatrix& coupling,
                                const SampleBatch& batch, double eta) {
  const int d = vec.dim();
  Eigen::MatrixXd out(d, d);
  const bool fourth = std::abs(eta - 2.0) < 1e-12;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (fourth) {
        const ChaosElement sq = chaos_product(coupling[i][j], coupling[i][j]);
        out(i, j) = inner_moment(sq, sq);
      } else {
        const Eigen::VectorXd col =
            batch.column("tau_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
        double acc = 0.0;
        for (Eigen::Index r = 0; r < col.size(); ++r)
          acc += std::pow(std::abs(col(r)), eta + 2.0);
        out(i, j) = acc / static_cast<double>(col.size());
      }
    }
  return out;
}

void run_chaotic_row(const ExperimentConfig& cfg, const ChaoticVector& vec, int n,
                     RoadmapRow& row, EntropyReport& report) {
  const int d = vec.dim();
  const Eigen::MatrixXd c_limit = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd& c_n = vec.covariance();
  const std::uint64_t seed_n = mix_seed(cfg.seed, static_cast<std::uint64_t>(n));

  SampleBatch batch = sample_batch(vec, cfg.samples, mix_seed(seed_n, 1));
  ElementMatrix coupling;

  auto guard = [&row](const char* stage, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      row.failures.push_back({stage, e.what()});
    }
  };

  // (a) explicit Stein coupling; E[tau] = C exactly
  guard("stein-matrix", [&] {
    coupling = stein_coupling_exact(vec);
    add_matrix_columns(batch, coupling, "tau");
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        worst = std::max(worst, std::abs(coupling[i][j].expectation() - c_n(i, j)));
    row.tau_check = worst;
  });

  // (b) tau moment table
  guard("tau-moments", [&] {
    const Eigen::MatrixXd moments = tau_abs_moments(vec, coupling, batch, cfg.eta);
    row.tau_moment_max = moments.maxCoeff();
  });

  // (c) TV-shift fit
  TvShiftFit shift_fit;
  guard("tv-shift", [&] {
    if (d > 2) throw std::runtime_error("tv-shift estimator restricted to d <= 2");
    const Eigen::MatrixXd f_small = batch.component_matrix(d).topRows(cfg.tv_samples);
    std::vector<Eigen::VectorXd> shifts;
    for (double a : {0.0, 1.0, -1.0, 2.0, -2.0}) {
      Eigen::VectorXd x = Eigen::VectorXd::Constant(d, a);
      shifts.push_back(x);
    }
    const std::vector<double> ts = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
    shift_fit = fit_tv_shift(f_small, shifts, ts);
    row.kappa_hat = shift_fit.kappa;
    row.alpha_hat = shift_fit.alpha;
  });
  const double alpha_used =
      std::isnan(row.alpha_hat) ? 0.5 : std::clamp(row.alpha_hat, 1e-3, 0.5);
  const double kappa_used = std::isnan(row.kappa_hat) ? 1.0 : std::max(row.kappa_hat, 1e-3);

  // (d) fourth-moment gap and Stein discrepancy, exact
  guard("delta", [&] {
    const DeltaPair delta = delta_fourth(vec);
    row.delta_moment = delta.moment_form;
    row.delta_cov = delta.covariance_form;
    row.discrepancy = stein_discrepancy(vec, coupling);
    row.gate_1d = d == 1 && row.discrepancy <= 1.0;
  });

  // entropy estimates
  QuadratureConfig quad;
  quad.core_nodes = cfg.core_nodes;
  quad.edge_nodes = cfg.edge_nodes;
  quad.eta = cfg.eta;
  quad.alpha = alpha_used;
  quad.eps = cfg.eps > 0.0 ? cfg.eps
                           : QuadratureConfig::eps_from_delta(
                                 std::isnan(row.discrepancy) ? 0.0 : row.discrepancy, cfg.eta,
                                 alpha_used);

  guard("de-bruijn", [&] {
    report = de_bruijn_entropy(batch.component_matrix(d), matrix_columns(batch, d, "tau"), c_n,
                               c_n, quad, mix_seed(seed_n, 2), 0, cfg.t0);
    row.d_hat = report.relative_entropy.value;
    row.d_err = report.relative_entropy.std_error;
    row.residual_envelope = report.residual_envelope;
    row.tail_beyond_t0 = report.tail_beyond_t0;
    row.pinsker = report.pinsker_tv_bound;
  });

  guard("stein-integral", [&] {
    const SteinIntegralResult si =
        stein_integral_entropy(batch.component_matrix(d), matrix_columns(batch, d, "tau"), c_n,
                               quad, mix_seed(seed_n, 3));
    row.a1 = si.a1.value;
    row.a2 = si.a2.value;
  });

  guard("direct-kl", [&] {
    if (d > 2) throw std::runtime_error("direct estimator restricted to d <= 2");
    DirectKlOptions opt;
    opt.t0 = cfg.t0;
    opt.eval_points = cfg.direct_samples;
    opt.kernel_points = cfg.direct_samples;
    opt.z_seed = mix_seed(seed_n, 4);
    const ValueWithError direct =
        relative_entropy_direct(batch.component_matrix(d), c_n, opt);
    row.d_direct = direct.value;
    row.d_direct_err = direct.std_error;
  });

  // bound evaluations, only inside their hypothesis gates
  guard("bounds", [&] {
    BoundInputs in;
    in.delta = row.discrepancy;
    in.eta = cfg.eta;
    in.alpha = alpha_used;
    in.kappa = kappa_used;
    in.C = c_n;
    in.tau_abs_moments = tau_abs_moments(vec, coupling, batch, cfg.eta);
    row.gate_multi = in.gate_multi();
    if (d == 1 && row.gate_1d) row.bound_1d = bound_entropy_1d(in);
    if (row.gate_multi) row.bound_multi = bound_entropy_multi(in, d);
  });

  // distribution diagnostics
  guard("distribution", [&] {
    const Eigen::MatrixXd f = batch.component_matrix(d);
    double ks = 0.0;
    for (int i = 0; i < d; ++i) {
      std::vector<double> col(f.col(i).data(), f.col(i).data() + f.rows());
      ks = std::max(ks, ks_statistic_gaussian(col));
    }
    row.ks_stat = ks;
    if (d == 1) {
      std::vector<double> col(f.col(0).data(), f.col(0).data() + std::min<Eigen::Index>(
                                                                      f.rows(), cfg.tv_samples));
      row.tv_smoothed = tv_smoothed_vs_gaussian_1d(col, c_n(0, 0));
    }
    const double d_zn = gaussian_kl_closed_form(c_limit, c_n);
    row.tv_assembly = (std::sqrt(std::max(0.0, row.d_hat)) + std::sqrt(std::max(0.0, d_zn))) /
                      std::numbers::sqrt2;
  });

  guard("det-gamma", [&] {
    const SampleBatch det_batch = head_batch(batch, std::min<Eigen::Index>(
                                                        batch.rows(), cfg.det_samples));
    const DetGammaEstimate dg = expected_det_gamma(vec, det_batch);
    row.e_det_gamma = dg.estimate;
    row.det_gamma_err = dg.std_error;
    row.det_verdict = dg.density_exists;
  });
}

void run_iid_row(const ExperimentConfig& cfg, int n, RoadmapRow& row) {
  const BaseDensity base = cfg.base == "gaussian" ? gaussian_base() : uniform_base();
  try {
    const SumExampleResult res =
        sum_example(base, n, cfg.samples, mix_seed(cfg.seed, static_cast<std::uint64_t>(n)));
    row.var_tau = res.var_tau;
    row.sum_tv_bound = res.tv_bound;
    row.proj_lhs = res.projection_lhs;
    row.proj_lhs_err = res.projection_lhs_err;
    row.proj_rhs = res.projection_rhs;
    row.tau_check = std::abs(res.tau_mean_check - 1.0);
  } catch (const std::exception& e) {
    row.failures.push_back({"iid-sum", e.what()});
  }
}

}  // namespace

RoadmapResult run_roadmap(const ExperimentConfig& cfg) {
  RoadmapResult result;
  result.config = cfg;
  const BenchmarkSet set = build_benchmark(cfg.family, cfg);

  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    const int n = cfg.n_list[i];
    RoadmapRow row;
    row.n = n;
    row.d = cfg.d;
    EntropyReport report;
    if (set.iid_sum) {
      run_iid_row(cfg, n, row);
    } else {
      run_chaotic_row(cfg, set.vectors[i], n, row, report);
    }
    result.reports.push_back(std::move(report));
    result.rows.push_back(std::move(row));
  }

  for (const RoadmapRow& row : result.rows) {
    if (!row.failures.empty()) result.all_gates_pass = false;
    if (!std::isnan(row.d_hat) && row.d_hat < -3.0 * row.d_err) result.all_gates_pass = false;
    if (!std::isnan(row.proj_lhs) && row.proj_lhs > row.proj_rhs + 3.0 * row.proj_lhs_err)
      result.all_gates_pass = false;
  }
  return result;
}

std::string summary_csv(const RoadmapResult& result) {
  std::string out =
      "family,n,d,delta_moment,delta_cov,discrepancy,tau_check,tau_moment_max,kappa_hat,"
      "alpha_hat,gate_1d,gate_multi,d_hat,d_err,d_direct,d_direct_err,a1,a2,bound_1d,bound_multi,"
      "pinsker_tv,tv_smoothed,ks_stat,tv_assembly,e_det_gamma,det_gamma_err,det_verdict,"
      "residual_envelope,tail_beyond_t0,var_tau,sum_tv_bound,proj_lhs,proj_lhs_err,proj_rhs,"
      "failures\n";
  for (const RoadmapRow& row : result.rows) {
    out += result.config.family;
    out += "," + std::to_string(row.n);
    out += "," + std::to_string(row.d);
    for (double v : {row.delta_moment, row.delta_cov, row.discrepancy, row.tau_check,
                     row.tau_moment_max, row.kappa_hat, row.alpha_hat})
      out += "," + g17(v);
    out += row.gate_1d ? ",1" : ",0";
    out += row.gate_multi ? ",1" : ",0";
    for (double v : {row.d_hat, row.d_err, row.d_direct, row.d_direct_err, row.a1, row.a2,
                     row.bound_1d, row.bound_multi, row.pinsker, row.tv_smoothed, row.ks_stat,
                     row.tv_assembly, row.e_det_gamma, row.det_gamma_err})
      out += "," + g17(v);
    out += row.det_verdict ? ",1" : ",0";
    for (double v : {row.residual_envelope, row.tail_beyond_t0, row.var_tau, row.sum_tv_bound,
                     row.proj_lhs, row.proj_lhs_err, row.proj_rhs})
      out += "," + g17(v);
    out += ",";
    for (std::size_t f = 0; f < row.failures.size(); ++f) {
      if (f) out += ";";
      std::string msg = row.failures[f].stage + ":" + row.failures[f].message;
      std::replace(msg.begin(), msg.end(), ',', ' ');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out += msg;
    }
    out += "\n";
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_outputs: cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("emit_outputs: write failed for " + path.string());
}

std::string fisher_curve_csv(const EntropyReport& report, int d) {
  std::string out = "t";
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out += ",j_st_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out += ",stderr_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
  out += ",integrand,integrand_err,regression_residual_rms\n";
  for (const FisherCurvePoint& cp : report.curve) {
    out += g17(cp.t);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out += "," + g17(cp.j_st(i, j));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out += "," + g17(cp.j_st_err(i, j));
    out += "," + g17(cp.integrand) + "," + g17(cp.integrand_err) + "," +
           g17(cp.regression_residual_rms) + "\n";
  }
  return out;
}

std::string score_grid_csv(const ExperimentConfig& cfg, const ChaoticVector& vec, int n) {
  const std::uint64_t seed_n = mix_seed(cfg.seed, static_cast<std::uint64_t>(n));
  const Eigen::Index m = std::min<long long>(cfg.samples, 20000);
  SampleBatch batch = sample_batch(vec, m, mix_seed(seed_n, 1));
  const ElementMatrix coupling = stein_coupling_exact(vec);
  add_matrix_columns(batch, coupling, "tau");
  const int d = vec.dim();
  const double t = 0.5;
  InterpolationPoint pt = make_interpolation(batch.component_matrix(d), vec.covariance(),
                                             vec.covariance(), t, mix_seed(seed_n, 9));
  SteinScore stein(pt, matrix_columns(batch, d, "tau"));

  std::string out = "x,score_stein,score_density,score_density_err,density,density_err\n";
  for (int g = 0; g <= 60; ++g) {
    const double x = -3.0 + 6.0 * g / 60.0;
    Eigen::VectorXd xv = Eigen::VectorXd::Constant(d, x);
    out += g17(x) + "," + g17(stein.score(xv)(0));
    const DensityScoreDetail detail = density_score_detail(pt, xv);
    if (detail.bulk) {
      out += "," + g17(detail.score(0)) + "," + g17(detail.score_err(0));
    } else {
      out += ",,";
    }
    out += "," + g17(detail.density) + "," + g17(detail.density_err) + "\n";
  }
  return out;
}

}  // namespace

void emit_outputs(const RoadmapResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "summary.csv", summary_csv(result));
  write_file(dir / "config.echo", result.config.echo());
  if (result.config.family == "iid-sum") return;
  const BenchmarkSet set = build_benchmark(result.config.family, result.config);
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const int n = result.rows[i].n;
    if (!result.reports[i].curve.empty())
      write_file(dir / ("fisher_curve_" + std::to_string(n) + ".csv"),
                 fisher_curve_csv(result.reports[i], result.rows[i].d));
    if (result.rows[i].d == 1)
      write_file(dir / ("score_grid_" + std::to_string(n) + ".csv"),
                 score_grid_csv(result.config, set.vectors[i], n));
  }
}

ChaosElement random_element(std::uint64_t seed, int basis_dim, int max_order, int terms) {
  UniformStream u(seed, 11);
  ChaosElement e(basis_dim);
  for (int t = 0; t < terms; ++t) {
    const auto row = static_cast<std::uint64_t>(t);
    const int order =
        1 + static_cast<int>(u.uniform(row, 0) * max_order) % std::max(1, max_order);
    std::vector<MultiIndex::Entry> entries;
    for (int j = 0; j < order; ++j) {
      const int idx = 1 + static_cast<int>(u.uniform(row, 1 + static_cast<std::uint32_t>(j)) *
                                           basis_dim) %
                              basis_dim;
      entries.emplace_back(idx, 1);
    }
    const double coeff = 2.0 * u.uniform(row, 40) - 1.0;
    e.add_term(MultiIndex::from_entries(std::move(entries)), coeff);
  }
  if (e.coefficients().empty()) e.add_term(MultiIndex::single(1, 1), 1.0);
  return e;
}

ChaoticVector random_chaotic_vector(std::uint64_t seed, int d, int max_q, int basis_dim) {
  UniformStream u(seed, 12);
  std::vector<ChaosElement> comps;
  for (int i = 0; i < d; ++i) {
    const auto row = static_cast<std::uint64_t>(i);
    const int q = 1 + static_cast<int>(u.uniform(row, 0) * max_q) % std::max(1, max_q);
    ChaosElement e(basis_dim);
    const int terms = 2 + static_cast<int>(u.uniform(row, 1) * 3.0);
    for (int t = 0; t < terms; ++t) {
      std::vector<MultiIndex::Entry> entries;
      for (int j = 0; j < q; ++j) {
        const int idx =
            1 + static_cast<int>(u.uniform(row, 8 + static_cast<std::uint32_t>(8 * t + j)) *
                                 basis_dim) %
                    basis_dim;
        entries.emplace_back(idx, 1);
      }
      const double coeff =
          (u.uniform(row, 60 + static_cast<std::uint32_t>(t)) < 0.5 ? -1.0 : 1.0) *
          (0.3 + 0.7 * u.uniform(row, 70 + static_cast<std::uint32_t>(t)));
      e.add_term(MultiIndex::from_entries(std::move(entries)), coeff);
    }
    const double norm = std::sqrt(e.l2_norm_squared());
    comps.push_back(e * (1.0 / norm));
  }
  return ChaoticVector::from_components(std::move(comps));
}

}  // namespace chaosent

#include "chaosent/knn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <vector>

namespace chaosent {

namespace {

int default_k(Eigen::Index m, int d) {
  const double k = std::ceil(std::pow(static_cast<double>(m), 4.0 / (4.0 + d)));
  return static_cast<int>(std::clamp<double>(k, 2.0, static_cast<double>(m)));
}

}  // namespace

struct KnnRegressor::Impl {
  Eigen::MatrixXd x;  // m x d
  Eigen::MatrixXd y;  // m x p
  int k = 0;

  // sorted-order bookkeeping (by first coordinate; exact window logic in 1-d)
  std::vector<Eigen::Index> order;    // sorted position -> training index
  Eigen::VectorXd xs;                 // d == 1: sorted predictor values
  Eigen::MatrixXd ys;                 // d == 1: responses in sorted order
  Eigen::MatrixXd prefix_y;           // (m+1) x p
  Eigen::MatrixXd prefix_yy;          // (m+1) x p(p+1)/2
  Eigen::VectorXd prefix_x, prefix_xx;  // (m+1)
  Eigen::MatrixXd prefix_xy;            // (m+1) x p

  // kd-tree (d >= 2)
  struct Node {
    int split_dim = -1;
    double split_val = 0.0;
    Eigen::Index begin = 0, end = 0;  // leaf range into `order`
    int left = -1, right = -1;
  };
  std::vector<Node> nodes;

  mutable bool insample_ready = false;
  mutable Eigen::MatrixXd insample;  // m x p, training order
  mutable std::vector<std::vector<double>> sorted_coords;  // lazy, per dim

  Eigen::Index m() const { return x.rows(); }
  int d() const { return static_cast<int>(x.cols()); }
  int p() const { return static_cast<int>(y.cols()); }

  // ---- construction ----

  void build() {
    const Eigen::Index n = m();
    order.resize(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    if (d() == 1) {
      std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return x(a, 0) != x(b, 0) ? x(a, 0) < x(b, 0) : a < b;
      });
      xs.resize(n);
      ys.resize(n, p());
      for (Eigen::Index i = 0; i < n; ++i) {
        xs(i) = x(order[i], 0);
        ys.row(i) = y.row(order[i]);
      }
      const int pp = p() * (p() + 1) / 2;
      prefix_y.setZero(n + 1, p());
      prefix_yy.setZero(n + 1, pp);
      prefix_x.setZero(n + 1);
      prefix_xx.setZero(n + 1);
      prefix_xy.setZero(n + 1, p());
      for (Eigen::Index i = 0; i < n; ++i) {
        prefix_y.row(i + 1) = prefix_y.row(i) + ys.row(i);
        prefix_x(i + 1) = prefix_x(i) + xs(i);
        prefix_xx(i + 1) = prefix_xx(i) + xs(i) * xs(i);
        prefix_xy.row(i + 1) = prefix_xy.row(i) + xs(i) * ys.row(i);
        int c = 0;
        for (int a = 0; a < p(); ++a)
          for (int b = a; b < p(); ++b, ++c)
            prefix_yy(i + 1, c) = prefix_yy(i, c) + ys(i, a) * ys(i, b);
      }
    } else {
      // spatially coherent scan order plus kd-tree for queries
      std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return x(a, 0) != x(b, 0) ? x(a, 0) < x(b, 0) : a < b;
      });
      nodes.reserve(2 * static_cast<std::size_t>(n) / 16 + 4);
      build_node(0, n, 0);
    }
  }

  int build_node(Eigen::Index begin, Eigen::Index end, int depth) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[id].begin = begin;
    nodes[id].end = end;
    if (end - begin <= 32) return id;
    const int dim = depth % d();
    const Eigen::Index mid = begin + (end - begin) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](Eigen::Index a, Eigen::Index b) { return x(a, dim) < x(b, dim); });
    nodes[id].split_dim = dim;
    nodes[id].split_val = x(order[mid], dim);
    const int left = build_node(begin, mid, depth + 1);
    const int right = build_node(mid, end, depth + 1);
    nodes[id].left = left;
    nodes[id].right = right;
    return id;
  }

  // ---- 1-d window selection ----

  // Best window [l, l+k) around insertion position for value v, given a lower
  // bound `lmin` for the left endpoint (monotone in v for sweeps).
  Eigen::Index window_start(double v, Eigen::Index lmin) const {
    const Eigen::Index n = m();
    Eigen::Index l = std::clamp<Eigen::Index>(lmin, 0, n - k);
    while (l + k < n && std::abs(xs(l + k) - v) < std::abs(xs(l) - v)) ++l;
    return l;
  }

  // Local-linear fit on window [l, l+k), evaluated at x0. `corr` is scaled so
  // that E[pred pred^T] ~ m m^T + corr / k (leverage times the df-corrected
  // residual covariance).
  void window_fit(Eigen::Index l, double x0, Eigen::VectorXd& pred, Eigen::MatrixXd& corr) const {
    const int pdim = p();
    const double kk = static_cast<double>(k);
    const Eigen::VectorXd ybar = (prefix_y.row(l + k) - prefix_y.row(l)).transpose() / kk;
    const double xbar = (prefix_x(l + k) - prefix_x(l)) / kk;
    const double cxx = (prefix_xx(l + k) - prefix_xx(l)) / kk - xbar * xbar;
    const bool sloped = cxx > 1e-12 * std::max(1.0, xbar * xbar);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(pdim);
    if (sloped) {
      const Eigen::VectorXd cxy =
          (prefix_xy.row(l + k) - prefix_xy.row(l)).transpose() / kk - xbar * ybar;
      beta = cxy / cxx;
    }
    const double dev = x0 - xbar;
    double leverage = 1.0 + (sloped ? dev * dev / cxx : 0.0);
    // extreme-order-statistic queries: the linear extrapolation variance blows
    // up with the leverage, while the conditional mean out there is data-starved
    // either way; fall back to the window mean past leverage 6
    const bool linear = sloped && leverage <= 6.0;
    if (!linear) {
      beta.setZero();
      leverage = 1.0;
    }
    pred = ybar + beta * dev;
    corr.resize(pdim, pdim);
    int c = 0;
    for (int a = 0; a < pdim; ++a)
      for (int b = a; b < pdim; ++b, ++c) {
        const double cyy = (prefix_yy(l + k, c) - prefix_yy(l, c)) / kk - ybar(a) * ybar(b);
        const double r = cyy - beta(a) * beta(b) * cxx;
        corr(a, b) = r;
        corr(b, a) = r;
      }
    corr *= leverage * (kk / std::max(1.0, kk - 2.0));
  }

  // ---- kd-tree k-NN ----

  void knn_query(const Eigen::VectorXd& q, std::vector<Eigen::Index>& out) const {
    using Item = std::pair<double, Eigen::Index>;  // (dist^2, training index)
    std::priority_queue<Item> heap;
    std::function<void(int)> visit = [&](int id) {
      const Node& node = nodes[id];
      if (node.split_dim < 0) {
        for (Eigen::Index i = node.begin; i < node.end; ++i) {
          const Eigen::Index idx = order[i];
          const double dist = (x.row(idx).transpose() - q).squaredNorm();
          if (static_cast<int>(heap.size()) < k) {
            heap.emplace(dist, idx);
          } else if (dist < heap.top().first) {
            heap.pop();
            heap.emplace(dist, idx);
          }
        }
        return;
      }
      const double delta = q(node.split_dim) - node.split_val;
      const int near = delta < 0 ? node.left : node.right;
      const int far = delta < 0 ? node.right : node.left;
      visit(near);
      if (static_cast<int>(heap.size()) < k || delta * delta < heap.top().first) visit(far);
    };
    visit(0);
    out.clear();
    out.reserve(heap.size());
    while (!heap.empty()) {
      out.push_back(heap.top().second);
      heap.pop();
    }
  }

  // ---- in-sample sweep ----

  // Calls fn(sweep_position, training_index, prediction, correction_cov) for
  // every training point, in sorted scan order. The prediction outer product
  // satisfies E[pred pred^T] ~ m m^T + correction_cov / k.
  template <typename Fn>
  void sweep(Fn&& fn) const {
    const Eigen::Index n = m();
    const int pdim = p();
    Eigen::VectorXd mean(pdim);
    Eigen::MatrixXd cov(pdim, pdim);
    if (d() == 1) {
      Eigen::Index l = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        l = window_start(xs(i), l);
        window_fit(l, xs(i), mean, cov);
        fn(i, order[i], mean, cov);
      }
    } else {
      std::vector<Eigen::Index> nb;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index idx = order[i];
        knn_query(x.row(idx).transpose(), nb);
        mean.setZero();
        for (Eigen::Index j : nb) mean += y.row(j).transpose();
        mean /= static_cast<double>(nb.size());
        cov.setZero();
        for (Eigen::Index j : nb) {
          const Eigen::VectorXd r = y.row(j).transpose() - mean;
          cov += r * r.transpose();
        }
        cov /= std::max<double>(1.0, static_cast<double>(nb.size()) - 1.0);
        fn(i, idx, mean, cov);
      }
    }
  }

  Eigen::Index block_length() const {
    return std::max<Eigen::Index>(k, (m() + 63) / 64);
  }
};

KnnRegressor::KnnRegressor(Eigen::MatrixXd x, Eigen::MatrixXd y, int k)
    : impl_(std::make_unique<Impl>()) {
  if (x.rows() != y.rows()) throw std::invalid_argument("KnnRegressor: X/Y row mismatch");
  if (x.rows() < 2) throw std::invalid_argument("KnnRegressor: need at least 2 samples");
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double lo = x.col(c).minCoeff();
    const double hi = x.col(c).maxCoeff();
    if (!(hi > lo))
      throw std::invalid_argument("KnnRegressor: predictor column " + std::to_string(c) +
                                  " is degenerate (zero variance)");
  }
  impl_->x = std::move(x);
  impl_->y = std::move(y);
  impl_->k = k > 0 ? std::min<int>(k, static_cast<int>(impl_->m()))
                   : default_k(impl_->m(), impl_->d());
  impl_->build();
}

KnnRegressor::~KnnRegressor() = default;
KnnRegressor::KnnRegressor(KnnRegressor&&) noexcept = default;
KnnRegressor& KnnRegressor::operator=(KnnRegressor&&) noexcept = default;

int KnnRegressor::k() const { return impl_->k; }
Eigen::Index KnnRegressor::samples() const { return impl_->m(); }
int KnnRegressor::x_dim() const { return impl_->d(); }
int KnnRegressor::y_dim() const { return impl_->p(); }

Eigen::VectorXd KnnRegressor::predict(const Eigen::VectorXd& q) const {
  if (q.size() != impl_->d()) throw std::invalid_argument("KnnRegressor::predict: bad dimension");
  if (impl_->d() == 1) {
    const auto lb = std::lower_bound(impl_->xs.data(), impl_->xs.data() + impl_->m(), q(0));
    const Eigen::Index pos = lb - impl_->xs.data();
    const Eigen::Index l = impl_->window_start(q(0), pos - impl_->k);
    Eigen::VectorXd pred;
    Eigen::MatrixXd corr;
    impl_->window_fit(l, q(0), pred, corr);
    return pred;
  }
  std::vector<Eigen::Index> nb;
  impl_->knn_query(q, nb);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(impl_->p());
  for (Eigen::Index j : nb) mean += impl_->y.row(j).transpose();
  return mean / static_cast<double>(nb.size());
}

const Eigen::MatrixXd& KnnRegressor::in_sample_predictions() const {
  if (!impl_->insample_ready) {
    impl_->insample.resize(impl_->m(), impl_->p());
    impl_->sweep([&](Eigen::Index, Eigen::Index idx, const Eigen::VectorXd& mean,
                     const Eigen::MatrixXd&) { impl_->insample.row(idx) = mean.transpose(); });
    impl_->insample_ready = true;
  }
  return impl_->insample;
}

KnnRegressor::SecondMoment KnnRegressor::conditional_second_moment() const {
  const int p = impl_->p();
  const Eigen::Index n = impl_->m();
  const Eigen::Index blk = impl_->block_length();
  const Eigen::Index nblocks = std::max<Eigen::Index>(1, n / blk);

  std::vector<Eigen::MatrixXd> block_sum(nblocks, Eigen::MatrixXd::Zero(p, p));
  std::vector<Eigen::Index> block_count(nblocks, 0);
  impl_->sweep([&](Eigen::Index pos, Eigen::Index, const Eigen::VectorXd& mean,
                   const Eigen::MatrixXd& cov) {
    const Eigen::Index b = std::min(pos / blk, nblocks - 1);
    block_sum[b] += mean * mean.transpose() - cov / impl_->k;
    block_count[b] += 1;
  });

  SecondMoment out;
  out.moment.setZero(p, p);
  Eigen::Index total = 0;
  for (Eigen::Index b = 0; b < nblocks; ++b) {
    out.moment += block_sum[b];
    total += block_count[b];
  }
  out.moment /= static_cast<double>(total);

  out.std_error.setZero(p, p);
  if (nblocks > 1) {
    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index b = 0; b < nblocks; ++b) {
      const Eigen::MatrixXd dev = block_sum[b] / block_count[b] - out.moment;
      var += dev.cwiseProduct(dev);
    }
    var /= static_cast<double>(nblocks - 1);
    out.std_error = (var / static_cast<double>(nblocks)).cwiseSqrt();
  }
  return out;
}

ValueWithError KnnRegressor::quadratic_form(const Eigen::MatrixXd& weight,
                                            const Eigen::VectorXd& center) const {
  if (weight.rows() != impl_->p() || weight.cols() != impl_->p())
    throw std::invalid_argument("KnnRegressor::quadratic_form: weight shape mismatch");
  const Eigen::Index n = impl_->m();
  const Eigen::Index blk = impl_->block_length();
  const Eigen::Index nblocks = std::max<Eigen::Index>(1, n / blk);

  std::vector<double> block_sum(nblocks, 0.0);
  std::vector<Eigen::Index> block_count(nblocks, 0);
  impl_->sweep([&](Eigen::Index pos, Eigen::Index, const Eigen::VectorXd& mean,
                   const Eigen::MatrixXd& cov) {
    const Eigen::Index b = std::min(pos / blk, nblocks - 1);
    const Eigen::VectorXd dev = mean - center;
    block_sum[b] += dev.dot(weight * dev) - (weight.cwiseProduct(cov)).sum() / impl_->k;
    block_count[b] += 1;
  });

  double total = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index b = 0; b < nblocks; ++b) {
    total += block_sum[b];
    count += block_count[b];
  }
  ValueWithError out;
  out.value = total / static_cast<double>(count);
  if (nblocks > 1) {
    double var = 0.0;
    for (Eigen::Index b = 0; b < nblocks; ++b) {
      const double dev = block_sum[b] / block_count[b] - out.value;
      var += dev * dev;
    }
    var /= static_cast<double>(nblocks - 1);
    out.std_error = std::sqrt(var / static_cast<double>(nblocks));
  }
  return out;
}

double KnnRegressor::x_quantile(int dim, double p) const {
  if (dim < 0 || dim >= impl_->d())
    throw std::invalid_argument("KnnRegressor::x_quantile: bad dimension");
  if (impl_->d() == 1)
    return impl_->xs(std::clamp<Eigen::Index>(
        static_cast<Eigen::Index>(p * (impl_->m() - 1)), 0, impl_->m() - 1));
  if (impl_->sorted_coords.empty())
    impl_->sorted_coords.resize(static_cast<std::size_t>(impl_->d()));
  auto& col = impl_->sorted_coords[static_cast<std::size_t>(dim)];
  if (col.empty()) {
    col.assign(impl_->x.col(dim).data(), impl_->x.col(dim).data() + impl_->m());
    std::sort(col.begin(), col.end());
  }
  return col[static_cast<std::size_t>(
      std::clamp<double>(p * (impl_->m() - 1), 0.0, static_cast<double>(impl_->m() - 1)))];
}

bool KnnRegressor::in_interior(const Eigen::VectorXd& x) const {
  if (x.size() != impl_->d())
    throw std::invalid_argument("KnnRegressor::in_interior: bad dimension");
  const double edge = 0.5 * impl_->k / static_cast<double>(impl_->m());
  for (int dim = 0; dim < impl_->d(); ++dim)
    if (x(dim) < x_quantile(dim, edge) || x(dim) > x_quantile(dim, 1.0 - edge)) return false;
  return true;
}

void KnnRegressor::for_each_window(const WindowFn& fn) const { impl_->sweep(fn); }

Eigen::Index KnnRegressor::block_length() const { return impl_->block_length(); }

double KnnRegressor::in_sample_residual_rms() const {
  const Eigen::MatrixXd& pred = in_sample_predictions();
  return std::sqrt((impl_->y - pred).squaredNorm() / static_cast<double>(impl_->y.size()));
}

}  // namespace chaosent

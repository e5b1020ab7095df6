#include "chaosent/chaos_element.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "chaosent/hermite.hpp"

namespace chaosent {

namespace {

constexpr int kTableSize = 64;

const std::array<double, kTableSize>& factorial_table() {
  static const auto table = [] {
    std::array<double, kTableSize> t{};
    t[0] = 1.0;
    for (int i = 1; i < kTableSize; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table;
}

double binom(int n, int k) {
  const auto& f = factorial_table();
  return f[n] / (f[k] * f[n - k]);
}

void format_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

ChaosElement::ChaosElement(int basis_dim) : basis_dim_(basis_dim) {
  if (basis_dim < 0) throw std::invalid_argument("ChaosElement: basis_dim must be >= 0");
}

ChaosElement ChaosElement::constant(int basis_dim, double value) {
  ChaosElement e(basis_dim);
  e.add_term(MultiIndex{}, value);
  return e;
}

ChaosElement ChaosElement::hermite_term(int basis_dim, std::int32_t index, std::int32_t order,
                                        double coeff) {
  ChaosElement e(basis_dim);
  e.add_term(MultiIndex::single(index, order), coeff);
  return e;
}

double ChaosElement::coefficient(const MultiIndex& alpha) const {
  auto it = coeffs_.find(alpha);
  return it == coeffs_.end() ? 0.0 : it->second;
}

double ChaosElement::expectation() const { return coefficient(MultiIndex{}); }

bool ChaosElement::is_centered() const { return expectation() == 0.0; }

bool ChaosElement::is_pure_chaos(int q) const {
  if (coeffs_.empty()) return false;
  for (const auto& [alpha, c] : coeffs_) {
    (void)c;
    if (alpha.weight() != q) return false;
  }
  return true;
}

double ChaosElement::l2_norm_squared() const {
  double s = 0.0;
  for (const auto& [alpha, c] : coeffs_) s += alpha.factorial() * c * c;
  return s;
}

ChaosElement ChaosElement::centered() const {
  ChaosElement e = *this;
  e.coeffs_.erase(MultiIndex{});
  e.recompute_max_order();
  return e;
}

void ChaosElement::add_term(const MultiIndex& alpha, double coeff) {
  if (alpha.max_index() > basis_dim_)
    throw std::invalid_argument("ChaosElement: multi-index exceeds basis_dim");
  auto [it, inserted] = coeffs_.try_emplace(alpha, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) {
      coeffs_.erase(it);
      recompute_max_order();
      return;
    }
  } else if (coeff == 0.0) {
    coeffs_.erase(it);
    return;
  }
  max_order_ = std::max(max_order_, alpha.weight());
}

void ChaosElement::recompute_max_order() {
  max_order_ = 0;
  for (const auto& [alpha, c] : coeffs_) {
    (void)c;
    max_order_ = std::max(max_order_, alpha.weight());
  }
}

double ChaosElement::evaluate(std::span<const double> point) const {
  if (point.size() != static_cast<std::size_t>(basis_dim_))
    throw std::invalid_argument("ChaosElement::evaluate: point length != basis_dim");
  double sum = 0.0;
  for (const auto& [alpha, c] : coeffs_) {
    double term = c;
    for (const auto& [idx, exp] : alpha.entries())
      term *= hermite_eval(exp, point[static_cast<std::size_t>(idx) - 1]);
    sum += term;
  }
  return sum;
}

Eigen::VectorXd ChaosElement::evaluate_rows(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != basis_dim_)
    throw std::invalid_argument("ChaosElement::evaluate_rows: column count != basis_dim");
  const Eigen::Index m = rows.rows();
  Eigen::VectorXd out(m);
  // H_k(x_i) table per row, k <= max_order_, i <= basis_dim
  std::vector<double> table(static_cast<std::size_t>(basis_dim_) * (max_order_ + 1));
  for (Eigen::Index r = 0; r < m; ++r) {
    for (int i = 0; i < basis_dim_; ++i) {
      std::span<double> col(table.data() + static_cast<std::size_t>(i) * (max_order_ + 1),
                            static_cast<std::size_t>(max_order_) + 1);
      hermite_eval_all(max_order_, rows(r, i), col);
    }
    double sum = 0.0;
    for (const auto& [alpha, c] : coeffs_) {
      double term = c;
      for (const auto& [idx, exp] : alpha.entries())
        term *= table[static_cast<std::size_t>(idx - 1) * (max_order_ + 1) + exp];
      sum += term;
    }
    out(r) = sum;
  }
  return out;
}

ChaosElement& ChaosElement::operator+=(const ChaosElement& other) {
  if (other.basis_dim_ != basis_dim_)
    throw std::invalid_argument("ChaosElement: basis_dim mismatch");
  for (const auto& [alpha, c] : other.coeffs_) add_term(alpha, c);
  return *this;
}

ChaosElement& ChaosElement::operator-=(const ChaosElement& other) {
  if (other.basis_dim_ != basis_dim_)
    throw std::invalid_argument("ChaosElement: basis_dim mismatch");
  for (const auto& [alpha, c] : other.coeffs_) add_term(alpha, -c);
  return *this;
}

ChaosElement& ChaosElement::operator*=(double scalar) {
  if (scalar == 0.0) {
    coeffs_.clear();
    max_order_ = 0;
    return *this;
  }
  for (auto& [alpha, c] : coeffs_) c *= scalar;
  return *this;
}

std::string ChaosElement::serialize() const {
  std::string out = "basis_dim " + std::to_string(basis_dim_) + "\n";
  for (const auto& [alpha, c] : coeffs_) {
    if (alpha.empty()) {
      out += "-";
    } else {
      bool first = true;
      for (const auto& [idx, exp] : alpha.entries()) {
        if (!first) out += ",";
        out += std::to_string(idx) + ":" + std::to_string(exp);
        first = false;
      }
    }
    out += " = ";
    format_double(out, c);
    out += "\n";
  }
  return out;
}

ChaosElement ChaosElement::deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  int basis_dim = -1;
  if (!(in >> header >> basis_dim) || header != "basis_dim" || basis_dim < 0)
    throw std::invalid_argument("ChaosElement::deserialize: missing basis_dim header");
  ChaosElement e(basis_dim);
  std::string line;
  std::getline(in, line);  // rest of header line
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto eq = line.find(" = ");
    if (eq == std::string::npos)
      throw std::invalid_argument("ChaosElement::deserialize: malformed line: " + line);
    std::string lhs = line.substr(0, eq);
    std::string rhs = line.substr(eq + 3);
    double coeff = std::strtod(rhs.c_str(), nullptr);
    std::vector<MultiIndex::Entry> entries;
    if (lhs != "-") {
      std::size_t pos = 0;
      while (pos < lhs.size()) {
        auto comma = lhs.find(',', pos);
        std::string tok = lhs.substr(pos, comma == std::string::npos ? comma : comma - pos);
        auto colon = tok.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("ChaosElement::deserialize: malformed index: " + tok);
        entries.emplace_back(std::stoi(tok.substr(0, colon)), std::stoi(tok.substr(colon + 1)));
        pos = comma == std::string::npos ? lhs.size() : comma + 1;
      }
    }
    e.add_term(MultiIndex::from_entries(std::move(entries)), coeff);
  }
  return e;
}

namespace {

// Expands prod_i H_{a_i}(G_i) * H_{b_i}(G_i) coordinate by coordinate and
// accumulates the resulting multi-index coefficients into `out`.
void expand_pair(const MultiIndex& alpha, const MultiIndex& beta, double coeff,
                 ChaosElement& out) {
  // merge coordinate lists
  std::vector<std::array<std::int32_t, 3>> coords;  // (index, a_exp, b_exp)
  {
    auto ae = alpha.entries();
    auto be = beta.entries();
    std::size_t i = 0, j = 0;
    while (i < ae.size() || j < be.size()) {
      if (j == be.size() || (i < ae.size() && ae[i].first < be[j].first)) {
        coords.push_back({ae[i].first, ae[i].second, 0});
        ++i;
      } else if (i == ae.size() || be[j].first < ae[i].first) {
        coords.push_back({be[j].first, 0, be[j].second});
        ++j;
      } else {
        coords.push_back({ae[i].first, ae[i].second, be[j].second});
        ++i;
        ++j;
      }
    }
  }

  const auto& fact = factorial_table();
  std::vector<MultiIndex::Entry> entries;
  entries.reserve(coords.size());

  // depth-first over the contraction count k_i in each coordinate
  std::vector<std::int32_t> choice(coords.size(), 0);

  auto recurse = [&](auto&& self, std::size_t ci, double c) -> void {
    if (ci == coords.size()) {
      entries.clear();
      for (std::size_t i = 0; i < coords.size(); ++i) {
        const std::int32_t exp = coords[i][1] + coords[i][2] - 2 * choice[i];
        if (exp > 0) entries.emplace_back(coords[i][0], exp);
      }
      out.add_term(MultiIndex::from_entries(entries), c);
      return;
    }
    const int a = coords[ci][1];
    const int b = coords[ci][2];
    const int kmax = std::min(a, b);
    for (int k = 0; k <= kmax; ++k) {
      choice[ci] = k;
      self(self, ci + 1, c * fact[k] * binom(a, k) * binom(b, k));
    }
  };
  recurse(recurse, 0, coeff);
}

}  // namespace

ChaosElement chaos_product(const ChaosElement& a, const ChaosElement& b, int order_cap) {
  if (a.basis_dim() != b.basis_dim())
    throw std::invalid_argument("chaos_product: basis_dim mismatch");
  if (a.max_order() + b.max_order() > order_cap)
    throw std::runtime_error("chaos_product: product order " +
                             std::to_string(a.max_order() + b.max_order()) +
                             " exceeds cap " + std::to_string(order_cap));
  ChaosElement out(a.basis_dim());
  for (const auto& [alpha, ca] : a.coefficients())
    for (const auto& [beta, cb] : b.coefficients()) expand_pair(alpha, beta, ca * cb, out);
  return out;
}

double inner_moment(const ChaosElement& a, const ChaosElement& b) {
  if (a.basis_dim() != b.basis_dim())
    throw std::invalid_argument("inner_moment: basis_dim mismatch");
  const auto& ca = a.coefficients();
  const auto& cb = b.coefficients();
  double s = 0.0;
  auto ia = ca.begin();
  auto ib = cb.begin();
  while (ia != ca.end() && ib != cb.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += ia->first.factorial() * ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

double exact_moment(std::span<const ChaosElement> elems, int order_cap) {
  if (elems.empty()) return 1.0;
  ChaosElement acc = elems[0];
  for (std::size_t i = 1; i < elems.size(); ++i) acc = chaos_product(acc, elems[i], order_cap);
  return acc.expectation();
}

}  // namespace chaosent

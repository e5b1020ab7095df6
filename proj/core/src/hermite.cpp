#include "chaosent/hermite.hpp"

#include <stdexcept>

namespace chaosent {

double hermite_eval(int m, double x) {
  if (m < 0) throw std::invalid_argument("hermite_eval: order must be >= 0");
  if (m == 0) return 1.0;
  double prev = 1.0;   // H_0
  double cur = x;      // H_1
  for (int k = 1; k < m; ++k) {
    double next = x * cur - static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void hermite_eval_all(int m, double x, std::span<double> out) {
  if (m < 0) throw std::invalid_argument("hermite_eval_all: order must be >= 0");
  if (out.size() < static_cast<std::size_t>(m) + 1)
    throw std::invalid_argument("hermite_eval_all: output span too small");
  out[0] = 1.0;
  if (m == 0) return;
  out[1] = x;
  for (int k = 1; k < m; ++k)
    out[k + 1] = x * out[k] - static_cast<double>(k) * out[k - 1];
}

}  // namespace chaosent

#pragma once

#include <span>

namespace chaosent {

// Probabilists' Hermite polynomial H_m(x), evaluated with the three-term
// recurrence H_{m+1}(x) = x H_m(x) - m H_{m-1}(x), H_0 = 1, H_1 = x.
double hermite_eval(int m, double x);

// Fills out[0..m] with H_0(x), ..., H_m(x).
void hermite_eval_all(int m, double x, std::span<double> out);

}  // namespace chaosent

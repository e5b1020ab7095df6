#include "chaosent/multi_index.hpp"

#include <algorithm>
#include <stdexcept>

namespace chaosent {

MultiIndex MultiIndex::single(std::int32_t index, std::int32_t exponent) {
  if (index < 1) throw std::invalid_argument("MultiIndex: basis index must be >= 1");
  if (exponent < 0) throw std::invalid_argument("MultiIndex: exponent must be >= 0");
  MultiIndex m;
  if (exponent > 0) {
    m.entries_.emplace_back(index, exponent);
    m.weight_ = exponent;
  }
  return m;
}

MultiIndex MultiIndex::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end());
  MultiIndex m;
  for (const auto& [idx, exp] : entries) {
    if (idx < 1) throw std::invalid_argument("MultiIndex: basis index must be >= 1");
    if (exp < 0) throw std::invalid_argument("MultiIndex: exponent must be >= 0");
    if (exp == 0) continue;
    if (!m.entries_.empty() && m.entries_.back().first == idx) {
      m.entries_.back().second += exp;
    } else {
      m.entries_.emplace_back(idx, exp);
    }
    m.weight_ += exp;
  }
  return m;
}

std::int32_t MultiIndex::max_index() const noexcept {
  return entries_.empty() ? 0 : entries_.back().first;
}

std::int32_t MultiIndex::exponent_of(std::int32_t index) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Entry& e, std::int32_t i) { return e.first < i; });
  return (it != entries_.end() && it->first == index) ? it->second : 0;
}

double MultiIndex::factorial() const noexcept {
  double f = 1.0;
  for (const auto& [idx, exp] : entries_) {
    (void)idx;
    for (std::int32_t j = 2; j <= exp; ++j) f *= static_cast<double>(j);
  }
  return f;
}

MultiIndex MultiIndex::with_exponent(std::int32_t index, std::int32_t exponent) const {
  std::vector<Entry> entries(entries_.begin(), entries_.end());
  auto it = std::find_if(entries.begin(), entries.end(),
                         [index](const Entry& e) { return e.first == index; });
  if (it != entries.end()) {
    if (exponent == 0) {
      entries.erase(it);
    } else {
      it->second = exponent;
    }
  } else if (exponent != 0) {
    entries.emplace_back(index, exponent);
  }
  return from_entries(std::move(entries));
}

}  // namespace chaosent

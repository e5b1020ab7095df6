#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace chaosent {

// Finitely supported exponent map over the Gaussian coordinate basis.
// Basis indices are 1-based. Entries are kept sorted by index and a zero
// exponent is never stored, so equal multi-indices compare equal bitwise.
class MultiIndex {
public:
  // (basis index, exponent), exponent >= 1
  using Entry = std::pair<std::int32_t, std::int32_t>;

  MultiIndex() = default;

  // H_exponent applied to a single coordinate; exponent 0 gives the empty index.
  static MultiIndex single(std::int32_t index, std::int32_t exponent);
  // Canonicalizes: sorts by index, merges duplicates, drops zero exponents.
  static MultiIndex from_entries(std::vector<Entry> entries);

  int weight() const noexcept { return weight_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::int32_t max_index() const noexcept;
  std::int32_t exponent_of(std::int32_t index) const noexcept;
  double factorial() const noexcept;  // prod_i exponent_i!
  std::span<const Entry> entries() const noexcept { return entries_; }

  // Replaces the exponent at `index` with `exponent` (0 removes the entry).
  MultiIndex with_exponent(std::int32_t index, std::int32_t exponent) const;

  bool operator==(const MultiIndex&) const = default;
  auto operator<=>(const MultiIndex&) const = default;

private:
  std::vector<Entry> entries_;
  std::int32_t weight_ = 0;
};

}  // namespace chaosent

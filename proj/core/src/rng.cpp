#include "chaosent/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace chaosent {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
}

inline double to_open_unit(std::uint64_t x) {
  // 53-bit mantissa, shifted off zero
  return static_cast<double>(x >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

std::array<std::uint32_t, 4> philox_block(std::uint64_t seed, std::uint32_t stream,
                                          std::uint64_t row, std::uint32_t blk) {
  std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(row),
                                      static_cast<std::uint32_t>(row >> 32), blk, stream};
  std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  for (int r = 0; r < 10; ++r) {
    philox_round(ctr, k0, k1);
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return ctr;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void GaussianStream::normals_for_block(std::uint64_t row, std::uint32_t blk, double& z0,
                                       double& z1) const {
  const auto w = philox_block(seed_, stream_, row, blk);
  const std::uint64_t a = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(w[2]) << 32) | w[3];
  const double u1 = to_open_unit(a);
  const double u2 = to_open_unit(b);
  const double r = std::sqrt(-2.0 * std::log(u1));
  z0 = r * std::cos(2.0 * std::numbers::pi * u2);
  z1 = r * std::sin(2.0 * std::numbers::pi * u2);
}

double GaussianStream::normal(std::uint64_t row, std::uint32_t col) const {
  double z0, z1;
  normals_for_block(row, col / 2, z0, z1);
  return (col % 2 == 0) ? z0 : z1;
}

void GaussianStream::fill_row(std::uint64_t row, std::span<double> out) const {
  double z0, z1;
  for (std::size_t c = 0; c < out.size(); c += 2) {
    normals_for_block(row, static_cast<std::uint32_t>(c / 2), z0, z1);
    out[c] = z0;
    if (c + 1 < out.size()) out[c + 1] = z1;
  }
}

Eigen::MatrixXd GaussianStream::matrix(Eigen::Index rows, Eigen::Index cols) const {
  Eigen::MatrixXd m(rows, cols);
  std::vector<double> buf(static_cast<std::size_t>(cols));
  for (Eigen::Index r = 0; r < rows; ++r) {
    fill_row(static_cast<std::uint64_t>(r), buf);
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = buf[static_cast<std::size_t>(c)];
  }
  return m;
}

double UniformStream::uniform(std::uint64_t row, std::uint32_t col) const {
  const auto w = philox_block(seed_, stream_, row, col / 2);
  const std::uint64_t x = (col % 2 == 0)
                              ? (static_cast<std::uint64_t>(w[0]) << 32) | w[1]
                              : (static_cast<std::uint64_t>(w[2]) << 32) | w[3];
  return to_open_unit(x);
}

}  // namespace chaosent

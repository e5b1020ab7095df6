#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <span>

namespace chaosent {

// splitmix64 step; used to derive per-stage seeds from one experiment seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

// Counter-based N(0,1) stream (Philox4x32-10 + Box-Muller). The value at
// (row, col) is a pure function of (seed, stream, row, col), so row ranges can
// be generated in any order — or in parallel — without changing the output.
class GaussianStream {
public:
  explicit GaussianStream(std::uint64_t seed, std::uint32_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  double normal(std::uint64_t row, std::uint32_t col) const;
  void fill_row(std::uint64_t row, std::span<double> out) const;
  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) const;

private:
  void normals_for_block(std::uint64_t row, std::uint32_t blk, double& z0, double& z1) const;

  std::uint64_t seed_;
  std::uint32_t stream_;
};

// Counter-based open-(0,1) uniform stream on the same generator.
class UniformStream {
public:
  explicit UniformStream(std::uint64_t seed, std::uint32_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  double uniform(std::uint64_t row, std::uint32_t col) const;

private:
  std::uint64_t seed_;
  std::uint32_t stream_;
};

}  // namespace chaosent

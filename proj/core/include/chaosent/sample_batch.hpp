#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chaosent/chaotic_vector.hpp"

namespace chaosent {

// A seeded matrix of i.i.d. N(0,1) draws over the active basis coordinates,
// plus named columns of functional values evaluated on each row. Regenerating
// with the same (seed, rows, basis_dim) reproduces the matrix bit-exactly.
struct SampleBatch {
  std::uint64_t seed = 0;
  Eigen::MatrixXd gaussians;  // rows x basis_dim
  std::vector<std::pair<std::string, Eigen::VectorXd>> evaluations;

  Eigen::Index rows() const { return gaussians.rows(); }
  int basis_dim() const { return static_cast<int>(gaussians.cols()); }

  void add_column(std::string name, Eigen::VectorXd values);
  const Eigen::VectorXd& column(std::string_view name) const;
  bool has_column(std::string_view name) const;
  // columns "F1".."Fd" as an m x d matrix
  Eigen::MatrixXd component_matrix(int d) const;
};

// Draws m rows with a counter-based generator keyed by seed and evaluates
// every component into columns "F1".."Fd".
SampleBatch sample_batch(const ChaoticVector& vec, Eigen::Index m, std::uint64_t seed);

// Evaluates a d x d matrix of chaos elements into columns "name_i_j" (1-based).
void add_matrix_columns(SampleBatch& batch, const std::vector<std::vector<ChaosElement>>& mat,
                        std::string_view name);

// The "name_i_j" columns as an m x d^2 matrix, row-major in (i, j).
Eigen::MatrixXd matrix_columns(const SampleBatch& batch, int d, std::string_view name);

}  // namespace chaosent

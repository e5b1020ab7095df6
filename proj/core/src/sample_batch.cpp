#include "chaosent/sample_batch.hpp"

#include <stdexcept>

#include "chaosent/rng.hpp"

namespace chaosent {

void SampleBatch::add_column(std::string name, Eigen::VectorXd values) {
  if (values.size() != rows())
    throw std::invalid_argument("SampleBatch: column length != rows");
  for (auto& [n, v] : evaluations) {
    if (n == name) {
      v = std::move(values);
      return;
    }
  }
  evaluations.emplace_back(std::move(name), std::move(values));
}

const Eigen::VectorXd& SampleBatch::column(std::string_view name) const {
  for (const auto& [n, v] : evaluations)
    if (n == name) return v;
  throw std::out_of_range("SampleBatch: no column named " + std::string(name));
}

bool SampleBatch::has_column(std::string_view name) const {
  for (const auto& [n, v] : evaluations) {
    (void)v;
    if (n == name) return true;
  }
  return false;
}

Eigen::MatrixXd SampleBatch::component_matrix(int d) const {
  Eigen::MatrixXd out(rows(), d);
  for (int i = 0; i < d; ++i) out.col(i) = column("F" + std::to_string(i + 1));
  return out;
}

SampleBatch sample_batch(const ChaoticVector& vec, Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample_batch: need m >= 1");
  SampleBatch batch;
  batch.seed = seed;
  batch.gaussians = GaussianStream(seed).matrix(m, vec.basis_dim());
  for (int i = 0; i < vec.dim(); ++i)
    batch.add_column("F" + std::to_string(i + 1), vec.component(i).evaluate_rows(batch.gaussians));
  return batch;
}

void add_matrix_columns(SampleBatch& batch, const std::vector<std::vector<ChaosElement>>& mat,
                        std::string_view name) {
  for (std::size_t i = 0; i < mat.size(); ++i)
    for (std::size_t j = 0; j < mat[i].size(); ++j)
      batch.add_column(std::string(name) + "_" + std::to_string(i + 1) + "_" +
                           std::to_string(j + 1),
                       mat[i][j].evaluate_rows(batch.gaussians));
}

Eigen::MatrixXd matrix_columns(const SampleBatch& batch, int d, std::string_view name) {
  Eigen::MatrixXd out(batch.rows(), d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out.col(i * d + j) =
          batch.column(std::string(name) + "_" + std::to_string(i + 1) + "_" +
                       std::to_string(j + 1));
  return out;
}

}  // namespace chaosent

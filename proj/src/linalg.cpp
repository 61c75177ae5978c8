#include "sparsebound/linalg.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sparsebound {

bool is_numerically_singular(const Eigen::MatrixXd& symmetric, double tol) {
  if (symmetric.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric,
                                                     Eigen::EigenvaluesOnly);
  const auto& lambda = eig.eigenvalues();
  const double largest = lambda.cwiseAbs().maxCoeff();
  return largest <= 0.0 || lambda.minCoeff() <= tol * largest;
}

Eigen::MatrixXd pseudo_inverse_symmetric(const Eigen::MatrixXd& symmetric,
                                         double tol) {
  const Eigen::Index k = symmetric.rows();
  if (k == 0) return Eigen::MatrixXd(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric);
  const auto& lambda = eig.eigenvalues();
  const double cutoff = tol * lambda.cwiseAbs().maxCoeff();
  Eigen::VectorXd inverted = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (std::abs(lambda(i)) > cutoff) inverted(i) = 1.0 / lambda(i);
  }
  const auto& Q = eig.eigenvectors();
  Eigen::MatrixXd result = Q * inverted.asDiagonal() * Q.transpose();
  return 0.5 * (result + result.transpose());
}

double binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double value = 1.0;
  for (std::int64_t i = 1; i <= k; ++i) {
    value = value * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (!std::isfinite(value)) return std::numeric_limits<double>::infinity();
  }
  return std::round(value);
}

void for_each_combination(
    Eigen::Index n, Eigen::Index k,
    const std::function<bool(const std::vector<Eigen::Index>&)>& visit) {
  if (k < 0 || k > n) return;
  std::vector<Eigen::Index> subset(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (!visit(subset)) return;
    // advance to the next combination in lexicographic order
    Eigen::Index i = k - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++subset[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < k; ++j) {
      subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace sparsebound

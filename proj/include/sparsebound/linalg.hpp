#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace sparsebound {

/// Relative eigenvalue cutoff below which a symmetric matrix is treated as
/// singular (lambda_min <= tol * lambda_max), and below which pseudo-inverse
/// eigenvalues are dropped.
inline constexpr double kSingularTolerance = 1e-12;

/// True when the symmetric matrix has lambda_min <= tol * lambda_max.
bool is_numerically_singular(const Eigen::MatrixXd& symmetric,
                             double tol = kSingularTolerance);

/// Moore-Penrose pseudo-inverse of a symmetric matrix via eigendecomposition.
/// Eigenvalues with |lambda| <= tol * max|lambda| are treated as zero.
Eigen::MatrixXd pseudo_inverse_symmetric(const Eigen::MatrixXd& symmetric,
                                         double tol = kSingularTolerance);

/// C(n, k) as a double (exact up to 2^53, saturating to +inf beyond).
double binomial(std::int64_t n, std::int64_t k);

/// Calls `visit` with each k-subset of {0..n-1} in lexicographic order.
/// Returning false from `visit` stops the enumeration early.
void for_each_combination(
    Eigen::Index n, Eigen::Index k,
    const std::function<bool(const std::vector<Eigen::Index>&)>& visit);

}  // namespace sparsebound

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sparsebound/random.hpp"

namespace sparsebound {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
/// Sorted, duplicate-free list of column indices (0-based).
using Support = std::vector<Index>;

/// The sensing matrix A. The identity is kept implicit so that unit-matrix
/// experiments with n in the tens of thousands never allocate n x n storage.
class SensingMatrix {
 public:
  explicit SensingMatrix(Matrix dense);
  static SensingMatrix identity(Index n);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  bool is_identity() const noexcept { return identity_; }

  /// Materialized matrix. Allocates rows() x cols() for the identity.
  Matrix dense() const;
  /// A x
  Vector apply(const Vector& x) const;
  /// A^T r
  Vector apply_transpose(const Vector& r) const;
  /// A_S: the columns listed in `support`.
  Matrix columns(const Support& support) const;
  /// A^T A
  Matrix gram() const;
  /// A_S^T A_S
  Matrix gram(const Support& support) const;

 private:
  SensingMatrix(Index n, bool);

  Matrix dense_;
  Index rows_ = 0;
  Index cols_ = 0;
  bool identity_ = false;
};

/// A sparse parameter vector together with its support.
class SparseSignal {
 public:
  /// Support is taken to be the nonzero entries of `x`.
  explicit SparseSignal(Vector x);
  /// Places `values` at the positions in `support` of a length-n zero vector.
  /// Throws if the support is unsorted, has duplicates or is out of range.
  static SparseSignal from_support(Index n, const Support& support,
                                   const Vector& values);

  const Vector& x() const noexcept { return x_; }
  const Support& support() const noexcept { return support_; }
  Index size() const noexcept { return x_.size(); }
  Index sparsity() const noexcept { return static_cast<Index>(support_.size()); }
  double squared_norm() const { return x_.squaredNorm(); }

  /// Position of the smallest-magnitude nonzero entry; empty for x = 0.
  /// Ties resolve to the lowest index.
  std::optional<Index> smallest_entry() const;

 private:
  Vector x_;
  Support support_;
};

/// y = (A + E) x + n with E_ij ~ N(0, sigma_e^2) and n ~ N(0, sigma_n^2 I).
class ProblemModel {
 public:
  ProblemModel(SensingMatrix A, double sigma_e, double sigma_n, Index s);
  ProblemModel(Matrix A, double sigma_e, double sigma_n, Index s)
      : ProblemModel(SensingMatrix(std::move(A)), sigma_e, sigma_n, s) {}

  const SensingMatrix& A() const noexcept { return A_; }
  double sigma_e() const noexcept { return sigma_e_; }
  double sigma_n() const noexcept { return sigma_n_; }
  Index sparsity() const noexcept { return s_; }
  Index m() const noexcept { return A_.rows(); }
  Index n() const noexcept { return A_.cols(); }

  /// Throws invalid_input unless the signal has length n and at most s nonzeros.
  void check(const SparseSignal& signal) const;

 private:
  SensingMatrix A_;
  double sigma_e_;
  double sigma_n_;
  Index s_;
};

/// sigma_e^2 ||x||^2 + sigma_n^2, the per-coordinate variance of y - A x.
double sigma_x_squared(const ProblemModel& model, const SparseSignal& signal);
/// Same quantity for an arbitrary (possibly non-sparse) vector.
double sigma_x_squared(double sigma_e, double sigma_n, const Vector& x);

/// Draws y. Uses the exact reduction E x + n ~ N(0, sigma_x^2 I), which
/// avoids materializing the m x n perturbation.
Vector sample_measurement(const ProblemModel& model, const SparseSignal& signal,
                          RandomStream& rng);

/// Draws A + E explicitly. Only meant for small problems and for checking
/// `sample_measurement` against the model definition.
Matrix sample_perturbed_matrix(const ProblemModel& model, RandomStream& rng);

/// iid N(0, 1/m) entries, filled column by column.
Matrix generate_gaussian_matrix(Index m, Index n, RandomStream& rng);

/// Uniformly random sorted s-subset of {0..n-1}.
Support random_support(Index n, Index s, RandomStream& rng);

/// Uniformly random size-s support with iid +-1 entries.
SparseSignal generate_bernoulli_signal(Index n, Index s, RandomStream& rng);

/// Exhaustive column-independence test: true iff spark(A) > k.
/// Refuses matrices wider than `max_columns` (unsupported_size).
bool spark_exceeds(const Matrix& A, Index k, Index max_columns = 20);

}  // namespace sparsebound

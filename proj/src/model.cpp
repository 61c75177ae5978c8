#include "sparsebound/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparsebound/error.hpp"
#include "sparsebound/linalg.hpp"

namespace sparsebound {

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::invalid_input, what);
}

}  // namespace

// ---------------------------------------------------------------------------
// SensingMatrix

SensingMatrix::SensingMatrix(Matrix dense)
    : dense_(std::move(dense)), rows_(dense_.rows()), cols_(dense_.cols()) {
  if (rows_ < 1 || cols_ < 1) invalid("sensing matrix must be at least 1x1");
  if (!dense_.allFinite()) invalid("sensing matrix has non-finite entries");
}

SensingMatrix::SensingMatrix(Index n, bool) : rows_(n), cols_(n), identity_(true) {
  if (n < 1) invalid("identity dimension must be positive");
}

SensingMatrix SensingMatrix::identity(Index n) { return SensingMatrix(n, true); }

Matrix SensingMatrix::dense() const {
  if (identity_) return Matrix::Identity(rows_, cols_);
  return dense_;
}

Vector SensingMatrix::apply(const Vector& x) const {
  if (x.size() != cols_) invalid("A x: length mismatch");
  if (identity_) return x;
  return dense_ * x;
}

Vector SensingMatrix::apply_transpose(const Vector& r) const {
  if (r.size() != rows_) invalid("A^T r: length mismatch");
  if (identity_) return r;
  return dense_.transpose() * r;
}

Matrix SensingMatrix::columns(const Support& support) const {
  Matrix out(rows_, static_cast<Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) {
    const Index c = support[j];
    if (c < 0 || c >= cols_) invalid("support index out of range");
    if (identity_) {
      out.col(static_cast<Index>(j)).setZero();
      out(c, static_cast<Index>(j)) = 1.0;
    } else {
      out.col(static_cast<Index>(j)) = dense_.col(c);
    }
  }
  return out;
}

Matrix SensingMatrix::gram() const {
  if (identity_) return Matrix::Identity(cols_, cols_);
  Matrix g = Matrix::Zero(cols_, cols_);
  g.selfadjointView<Eigen::Lower>().rankUpdate(dense_.transpose());
  return g.selfadjointView<Eigen::Lower>();
}

Matrix SensingMatrix::gram(const Support& support) const {
  if (identity_) {
    columns(support);  // range check
    return Matrix::Identity(static_cast<Index>(support.size()),
                            static_cast<Index>(support.size()));
  }
  const Matrix cols = columns(support);
  return cols.transpose() * cols;
}

// ---------------------------------------------------------------------------
// SparseSignal

SparseSignal::SparseSignal(Vector x) : x_(std::move(x)) {
  if (x_.size() < 1) invalid("signal must have positive length");
  if (!x_.allFinite()) invalid("signal has non-finite entries");
  for (Index i = 0; i < x_.size(); ++i) {
    if (x_(i) != 0.0) support_.push_back(i);
  }
}

SparseSignal SparseSignal::from_support(Index n, const Support& support,
                                        const Vector& values) {
  if (static_cast<Index>(support.size()) != values.size()) {
    invalid("support and values differ in length");
  }
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] < 0 || support[i] >= n) invalid("support index out of range");
    if (i > 0 && support[i] <= support[i - 1]) {
      invalid("support must be sorted and duplicate-free");
    }
  }
  Vector x = Vector::Zero(n);
  for (std::size_t i = 0; i < support.size(); ++i) {
    x(support[i]) = values(static_cast<Index>(i));
  }
  return SparseSignal(std::move(x));
}

std::optional<Index> SparseSignal::smallest_entry() const {
  std::optional<Index> best;
  for (Index i : support_) {
    if (!best || std::abs(x_(i)) < std::abs(x_(*best))) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------
// ProblemModel

ProblemModel::ProblemModel(SensingMatrix A, double sigma_e, double sigma_n, Index s)
    : A_(std::move(A)), sigma_e_(sigma_e), sigma_n_(sigma_n), s_(s) {
  if (!(sigma_e >= 0.0) || !std::isfinite(sigma_e)) invalid("sigma_e must be >= 0");
  if (!(sigma_n >= 0.0) || !std::isfinite(sigma_n)) invalid("sigma_n must be >= 0");
  if (s < 1 || s > A_.cols()) invalid("sparsity s must satisfy 1 <= s <= n");
}

void ProblemModel::check(const SparseSignal& signal) const {
  if (signal.size() != n()) {
    invalid("signal length " + std::to_string(signal.size()) +
            " does not match n = " + std::to_string(n()));
  }
  if (signal.sparsity() > s_) {
    invalid("signal has " + std::to_string(signal.sparsity()) +
            " nonzeros, more than s = " + std::to_string(s_));
  }
}

double sigma_x_squared(double sigma_e, double sigma_n, const Vector& x) {
  return sigma_e * sigma_e * x.squaredNorm() + sigma_n * sigma_n;
}

double sigma_x_squared(const ProblemModel& model, const SparseSignal& signal) {
  model.check(signal);
  return sigma_x_squared(model.sigma_e(), model.sigma_n(), signal.x());
}

Vector sample_measurement(const ProblemModel& model, const SparseSignal& signal,
                          RandomStream& rng) {
  const double sigma = std::sqrt(sigma_x_squared(model, signal));
  Vector y = model.A().apply(signal.x());
  if (sigma > 0.0) {
    for (Index i = 0; i < y.size(); ++i) y(i) += rng.normal(sigma);
  }
  return y;
}

Matrix sample_perturbed_matrix(const ProblemModel& model, RandomStream& rng) {
  Matrix perturbed = model.A().dense();
  for (Index j = 0; j < perturbed.cols(); ++j) {
    for (Index i = 0; i < perturbed.rows(); ++i) {
      perturbed(i, j) += rng.normal(model.sigma_e());
    }
  }
  return perturbed;
}

Matrix generate_gaussian_matrix(Index m, Index n, RandomStream& rng) {
  if (m < 1 || n < 1) invalid("matrix dimensions must be positive");
  const double stddev = 1.0 / std::sqrt(static_cast<double>(m));
  Matrix A(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) A(i, j) = rng.normal(stddev);
  }
  return A;
}

Support random_support(Index n, Index s, RandomStream& rng) {
  if (n < 1 || s < 0 || s > n) invalid("need 0 <= s <= n for a random support");
  // partial Fisher-Yates: the first s slots form a uniform s-subset
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < s; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  Support support(pool.begin(), pool.begin() + s);
  std::sort(support.begin(), support.end());
  return support;
}

SparseSignal generate_bernoulli_signal(Index n, Index s, RandomStream& rng) {
  const Support support = random_support(n, s, rng);
  Vector values(s);
  for (Index i = 0; i < s; ++i) values(i) = rng.coin() ? 1.0 : -1.0;
  return SparseSignal::from_support(n, support, values);
}

bool spark_exceeds(const Matrix& A, Index k, Index max_columns) {
  if (k < 0) invalid("spark test needs k >= 0");
  if (A.cols() > max_columns) {
    throw Error(ErrorCode::unsupported_size,
                "exhaustive spark check limited to n <= " + std::to_string(max_columns));
  }
  if (k == 0) return true;
  // all n columns independent means no dependent subset exists at all
  if (k > A.cols()) k = A.cols();
  // spark(A) <= m + 1
  if (k > A.rows()) return false;
  bool independent = true;
  for_each_combination(A.cols(), k, [&](const std::vector<Index>& cols) {
    Matrix sub(A.rows(), k);
    for (Index j = 0; j < k; ++j) sub.col(j) = A.col(cols[static_cast<std::size_t>(j)]);
    Eigen::ColPivHouseholderQR<Matrix> qr(sub);
    if (qr.rank() < k) {
      independent = false;
      return false;
    }
    return true;
  });
  return independent;
}

}  // namespace sparsebound

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sparsebound/error.hpp"
#include "sparsebound/model.hpp"

using namespace sparsebound;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

Matrix random_matrix(Index m, Index n, std::uint64_t seed) {
  RandomStream rng(seed);
  return generate_gaussian_matrix(m, n, rng);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("sigma_x^2 examples") {
  CHECK(sigma_x_squared(5.0, 1.0, Vector::Zero(4)) == 1.0);
  CHECK(sigma_x_squared(0.0, 2.0, vec({3, -1, 7})) == 4.0);
  CHECK(sigma_x_squared(1.0, 1.0, vec({1, 1, 0})) == 3.0);

  const ProblemModel model(SensingMatrix::identity(3), 1.0, 1.0, 2);
  CHECK(sigma_x_squared(model, SparseSignal(vec({1, 1, 0}))) == 3.0);
  CHECK_THROWS_AS(sigma_x_squared(model, SparseSignal(vec({1, 1}))), Error);
}

TEST_CASE("sigma_x^2 >= sigma_n^2 with equality iff x = 0 or sigma_e = 0") {
  RandomStream rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double se = trial % 4 == 0 ? 0.0 : rng.uniform();
    const double sn = rng.uniform();
    Vector x = Vector::Zero(6);
    if (trial % 3 != 0) x(static_cast<Index>(rng.below(6))) = rng.normal();
    const double v = sigma_x_squared(se, sn, x);
    CHECK(v >= sn * sn);
    CHECK((v == sn * sn) == (se == 0.0 || x.squaredNorm() == 0.0));
  }
}

TEST_CASE("model and signal validation") {
  CHECK_THROWS_AS(ProblemModel(SensingMatrix::identity(3), -1.0, 1.0, 1), Error);
  CHECK_THROWS_AS(ProblemModel(SensingMatrix::identity(3), 0.1, std::nan(""), 1), Error);
  CHECK_THROWS_AS(ProblemModel(SensingMatrix::identity(3), 0.1, 1.0, 0), Error);
  CHECK_THROWS_AS(ProblemModel(SensingMatrix::identity(3), 0.1, 1.0, 4), Error);

  const SparseSignal x = SparseSignal::from_support(5, {1, 3}, vec({2, -1}));
  CHECK(x.support() == Support{1, 3});
  CHECK(x.x()(3) == -1.0);
  CHECK_THROWS_AS(SparseSignal::from_support(5, {3, 1}, vec({2, -1})), Error);
  CHECK_THROWS_AS(SparseSignal::from_support(5, {1, 1}, vec({2, -1})), Error);
  CHECK_THROWS_AS(SparseSignal::from_support(5, {1, 5}, vec({2, -1})), Error);

  const ProblemModel model(SensingMatrix::identity(5), 0.1, 1.0, 1);
  CHECK_THROWS_AS(model.check(x), Error);
}

TEST_CASE("smallest entry resolves ties to the lowest index") {
  CHECK(SparseSignal(vec({0, -2, 2, 3})).smallest_entry() == Index{1});
  CHECK(SparseSignal(vec({5, 0, -1})).smallest_entry() == Index{2});
  CHECK_FALSE(SparseSignal(Vector::Zero(3)).smallest_entry().has_value());
}

TEST_CASE("noiseless measurement is A x") {
  const Matrix A = random_matrix(4, 6, 1);
  const ProblemModel model(A, 0.0, 0.0, 2);
  const SparseSignal x = SparseSignal::from_support(6, {0, 4}, vec({1.5, -2}));
  RandomStream rng(9);
  CHECK((sample_measurement(model, x, rng) - A * x.x()).norm() == 0.0);
}

TEST_CASE("measurements repeat for a repeated seed") {
  const ProblemModel model(random_matrix(4, 6, 1), 0.3, 0.5, 2);
  const SparseSignal x = SparseSignal::from_support(6, {0, 4}, vec({1.5, -2}));
  RandomStream a(77), b(77);
  CHECK(sample_measurement(model, x, a) == sample_measurement(model, x, b));
}

TEST_CASE("residual covariance is sigma_x^2 I") {
  const Matrix A = random_matrix(3, 5, 2);
  const double se = 0.4, sn = 0.7;
  const ProblemModel model(A, se, sn, 2);
  const SparseSignal x = SparseSignal::from_support(5, {1, 2}, vec({1.0, -0.5}));
  const double s2 = oracle::sigma_x2(x.x(), se, sn);

  const auto check_cov = [&](auto draw, int draws) {
    Vector mean = Vector::Zero(3);
    Matrix second = Matrix::Zero(3, 3);
    for (int t = 0; t < draws; ++t) {
      const Vector r = draw(t) - A * x.x();
      mean += r;
      second += r * r.transpose();
    }
    mean /= draws;
    const Matrix cov = second / draws - mean * mean.transpose();
    for (Index i = 0; i < 3; ++i) {
      CHECK(std::abs(mean(i)) < 3.0 * std::sqrt(s2 / draws));
      for (Index j = 0; j < 3; ++j) {
        const double target = i == j ? s2 : 0.0;
        CHECK(std::abs(cov(i, j) - target) < 0.03 * s2);
      }
    }
  };

  RandomStream rng(5);
  check_cov([&](int) { return sample_measurement(model, x, rng); }, 100000);

  // The explicit route: draw A + E and n, then form (A + E) x + n.
  RandomStream rng2(6);
  check_cov(
      [&](int) {
        const Matrix AE = sample_perturbed_matrix(model, rng2);
        Vector noise(3);
        for (Index i = 0; i < 3; ++i) noise(i) = rng2.normal(sn);
        return Vector(AE * x.x() + noise);
      },
      100000);
}

TEST_CASE("Gaussian matrices have unit expected column norm") {
  RandomStream rng(21);
  double total = 0.0;
  int columns = 0;
  for (int draw = 0; draw < 100; ++draw) {
    const Matrix A = generate_gaussian_matrix(10, 50, rng);
    total += A.colwise().squaredNorm().sum();
    columns += 50;
  }
  CHECK(std::abs(total / columns - 1.0) < 0.02);

  RandomStream a(4), b(4);
  CHECK(generate_gaussian_matrix(3, 7, a) == generate_gaussian_matrix(3, 7, b));
  RandomStream c(4);
  const Matrix scalar = generate_gaussian_matrix(1, 1, c);
  CHECK(scalar.rows() == 1);
  CHECK(scalar.cols() == 1);
  CHECK(std::isfinite(scalar(0, 0)));
}

TEST_CASE("Bernoulli signals") {
  RandomStream rng(8);
  const Index n = 20, s = 5;
  const int draws = 10000;
  int hits = 0;
  for (int t = 0; t < draws; ++t) {
    const SparseSignal x = generate_bernoulli_signal(n, s, rng);
    REQUIRE(x.sparsity() == s);
    REQUIRE(x.squared_norm() == static_cast<double>(s));
    REQUIRE(std::is_sorted(x.support().begin(), x.support().end()));
    for (Index i : x.support()) REQUIRE(std::abs(x.x()(i)) == 1.0);
    if (x.x()(0) != 0.0) ++hits;
  }
  const double p = static_cast<double>(s) / n;
  const double sd = std::sqrt(draws * p * (1 - p));
  CHECK(std::abs(hits - draws * p) < 3.0 * sd);

  const SparseSignal full = generate_bernoulli_signal(4, 4, rng);
  CHECK(full.support() == Support{0, 1, 2, 3});
  CHECK_THROWS_AS(generate_bernoulli_signal(3, 4, rng), Error);
}

TEST_CASE("spark") {
  CHECK(spark_exceeds(Matrix::Identity(6, 6), 5));

  Matrix repeated = random_matrix(4, 5, 3);
  repeated.col(3) = repeated.col(1);
  CHECK_FALSE(spark_exceeds(repeated, 2));
  CHECK(spark_exceeds(repeated, 1));

  // Exhaustive rank oracle on every 4-column submatrix.
  const Matrix A = random_matrix(4, 8, 4);
  bool all_full_rank = true;
  for (int mask = 0; mask < 256; ++mask) {
    if (__builtin_popcount(mask) != 4) continue;
    Matrix sub(4, 4);
    Index c = 0;
    for (Index j = 0; j < 8; ++j) {
      if (mask & (1 << j)) sub.col(c++) = A.col(j);
    }
    Eigen::JacobiSVD<Matrix> svd(sub);
    if (svd.singularValues()(3) <= 1e-12 * svd.singularValues()(0)) all_full_rank = false;
  }
  CHECK(all_full_rank);
  CHECK(spark_exceeds(A, 4) == all_full_rank);
  CHECK_FALSE(spark_exceeds(A, 5));

  CHECK_THROWS_AS(spark_exceeds(random_matrix(5, 21, 1), 2), Error);
}

}

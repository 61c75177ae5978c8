#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sparsebound/error.hpp"
#include "sparsebound/fisher.hpp"

using namespace sparsebound;

namespace {

struct Instance {
  ProblemModel model;
  SparseSignal x;
};

Instance small_instance(double se = 0.3, double sn = 0.5, std::uint64_t seed = 17) {
  RandomStream rng(seed);
  Matrix A = generate_gaussian_matrix(4, 6, rng);
  SparseSignal x = generate_bernoulli_signal(6, 2, rng);
  return {ProblemModel(std::move(A), se, sn, 2), std::move(x)};
}

double rel_frobenius(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_SUITE("fisher") {

TEST_CASE("closed form against the entrywise formula") {
  const auto inst = small_instance();
  const Matrix J = fim_closed_form(inst.model, inst.x).J;
  CHECK(rel_frobenius(J, oracle::fisher(inst.model.A().dense(), inst.x.x(), 0.3, 0.5)) < 1e-13);
}

TEST_CASE("without perturbation J is the classical A^T A / sigma_n^2") {
  const auto inst = small_instance(0.0, 0.5);
  const Matrix A = inst.model.A().dense();
  CHECK(rel_frobenius(fim_closed_form(inst.model, inst.x).J, A.transpose() * A / 0.25) < 1e-14);
}

TEST_CASE("identity matrix at x = 0 with unit noise gives J = I") {
  const ProblemModel model(SensingMatrix::identity(4), 0.7, 1.0, 2);
  const FisherMatrix f = fim_closed_form(model, SparseSignal(Vector::Zero(4)));
  CHECK(f.sigma_x2 == 1.0);
  CHECK(f.J == Matrix::Identity(4, 4));
}

TEST_CASE("J is symmetric PSD and exceeds A^T A / sigma_x^2 by a rank-one PSD term") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = small_instance(0.2 + 0.05 * static_cast<double>(seed), 0.3, seed);
    const FisherMatrix f = fim_closed_form(inst.model, inst.x);
    const Matrix A = inst.model.A().dense();
    CHECK((f.J - f.J.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(f.J);
    CHECK(eig.eigenvalues().minCoeff() > -1e-12 * eig.eigenvalues().maxCoeff());
    const Matrix extra = f.J - A.transpose() * A / f.sigma_x2;
    Eigen::SelfAdjointEigenSolver<Matrix> e2(extra);
    const auto ev = e2.eigenvalues();
    CHECK(ev.minCoeff() > -1e-12 * ev.maxCoeff());
    CHECK(ev(ev.size() - 2) < 1e-12 * ev.maxCoeff());
    CHECK(inst.x.x().dot(f.J * inst.x.x()) >= 0.0);
  }
}

TEST_CASE("zero sigma_x^2 is rejected") {
  const ProblemModel model(SensingMatrix::identity(3), 0.0, 0.0, 1);
  const SparseSignal x(Vector::Zero(3));
  CHECK_THROWS_AS(fim_closed_form(model, x), Error);
  CHECK_THROWS_AS(log_likelihood(model, x, Vector::Zero(3)), Error);
  CHECK_THROWS_AS(fim_monte_carlo(model, x, 10, 1), Error);
}

TEST_CASE("log-likelihood values") {
  const auto inst = small_instance();
  const double s2 = sigma_x_squared(inst.model, inst.x);
  const Vector Ax = inst.model.A().apply(inst.x.x());
  const double base = log_likelihood(inst.model, inst.x, Ax);
  CHECK(base == doctest::Approx(-2.0 * std::log(2.0 * M_PI * s2)).epsilon(1e-14));

  Vector r(4);
  r << 0.3, -0.1, 0.2, 0.5;
  const double one = log_likelihood(inst.model, inst.x, Ax + r);
  const double two = log_likelihood(inst.model, inst.x, Ax + 2.0 * r);
  CHECK(one - two == doctest::Approx(3.0 * r.squaredNorm() / (2.0 * s2)).epsilon(1e-12));
}

TEST_CASE("score agrees with central differences of the log-likelihood") {
  RandomStream rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = small_instance(0.4, 0.3, 100 + static_cast<std::uint64_t>(trial));
    Vector y = inst.model.A().apply(inst.x.x());
    for (Index i = 0; i < y.size(); ++i) y(i) += rng.normal();
    // The score is the gradient over all of R^n, so perturb every coordinate.
    Vector x = inst.x.x();
    for (Index i = 0; i < x.size(); ++i) x(i) += 0.1 * rng.normal();
    const ProblemModel dense(inst.model.A().dense(), 0.4, 0.3, 6);
    const Vector analytic = score(dense, SparseSignal(x), y);
    Vector numeric(x.size());
    const double h = 1e-6 * std::max(1.0, x.norm());
    for (Index i = 0; i < x.size(); ++i) {
      Vector xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      numeric(i) = (oracle::log_density(dense.A().dense(), xp, 0.4, 0.3, y) -
                    oracle::log_density(dense.A().dense(), xm, 0.4, 0.3, y)) /
                   (2.0 * h);
    }
    CHECK((analytic - numeric).norm() <= 1e-5 * analytic.norm());
  }
}

TEST_CASE("score has zero mean") {
  const auto inst = small_instance();
  RandomStream rng(5);
  const int draws = 100000;
  Vector mean = Vector::Zero(6);
  Vector second = Vector::Zero(6);
  for (int t = 0; t < draws; ++t) {
    const Vector g = score(inst.model, inst.x, sample_measurement(inst.model, inst.x, rng));
    mean += g;
    second += g.cwiseProduct(g);
  }
  mean /= draws;
  const Vector se = ((second / draws - mean.cwiseProduct(mean)) / draws).cwiseSqrt();
  for (Index i = 0; i < 6; ++i) CHECK(std::abs(mean(i)) < 3.0 * se(i));
}

TEST_CASE("Monte Carlo FIM converges to the closed form") {
  const auto inst = small_instance();
  const Matrix J = fim_closed_form(inst.model, inst.x).J;
  std::vector<double> small_err, large_err;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    small_err.push_back(rel_frobenius(fim_monte_carlo(inst.model, inst.x, 10000, seed).J, J));
    large_err.push_back(rel_frobenius(fim_monte_carlo(inst.model, inst.x, 200000, seed).J, J));
  }
  std::sort(small_err.begin(), small_err.end());
  std::sort(large_err.begin(), large_err.end());
  CHECK(large_err[2] < small_err[2]);
  CHECK(large_err[2] < 0.05);
}

TEST_CASE("Monte Carlo FIM without perturbation") {
  const auto inst = small_instance(0.0, 0.5);
  const Matrix A = inst.model.A().dense();
  CHECK(rel_frobenius(fim_monte_carlo(inst.model, inst.x, 200000, 3).J,
                      A.transpose() * A / 0.25) < 0.03);
}

TEST_CASE("Monte Carlo FIM is reproducible and independent of the thread count") {
  const auto inst = small_instance();
  const auto a = fim_monte_carlo(inst.model, inst.x, 20000, 8, {1, 1000});
  const auto b = fim_monte_carlo(inst.model, inst.x, 20000, 8, {1, 1000});
  const auto c = fim_monte_carlo(inst.model, inst.x, 20000, 8, {4, 1000});
  CHECK(a.J == b.J);
  CHECK(a.J == c.J);
}

}

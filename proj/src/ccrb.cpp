#include "sparsebound/ccrb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sparsebound/error.hpp"
#include "sparsebound/fisher.hpp"
#include "sparsebound/linalg.hpp"

namespace sparsebound {

std::string_view to_string(SupportRegime regime) noexcept {
  return regime == SupportRegime::maximal ? "maximal" : "nonmaximal";
}

namespace {

double positive_sigma_x2(const ProblemModel& model, const SparseSignal& signal) {
  const double s2 = sigma_x_squared(model, signal);
  if (!(s2 > 0.0)) {
    throw Error(ErrorCode::degenerate_model, "sigma_x^2 = 0: the CCRB is undefined");
  }
  return s2;
}

Vector gather(const Vector& x, const Support& support) {
  Vector out(static_cast<Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) out(static_cast<Index>(i)) = x(support[i]);
  return out;
}

// sigma_x^2 [tr(G^{-1}) - 2 m se^4 |G^{-1} x|^2 / (sigma_x^2 + 2 m se^4 x^T G^{-1} x)]
// with G given through its inverse.
CcrbReport rank_one_corrected(const Matrix& G_inv, const Vector& x, double s2,
                              const ProblemModel& model, SupportRegime regime) {
  const double se2 = model.sigma_e() * model.sigma_e();
  const double weight = 2.0 * static_cast<double>(model.m()) * se2 * se2;
  const Vector w = G_inv * x;
  const double quad = x.dot(w);

  CcrbReport report;
  report.regime = regime;
  report.first_term = s2 * G_inv.trace();
  report.d_ccrb = weight == 0.0 ? 0.0 : s2 * weight * w.squaredNorm() / (s2 + weight * quad);
  report.bound = report.first_term - report.d_ccrb;
  report.gamma_ccrb = report.first_term > 0.0 ? report.d_ccrb / report.first_term : 0.0;
  return report;
}

Matrix cholesky_inverse(const Matrix& G) {
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::singular_submatrix, "Gram matrix is not positive definite");
  }
  Matrix inv = llt.solve(Matrix::Identity(G.rows(), G.cols()));
  return 0.5 * (inv + inv.transpose());
}

}  // namespace

CcrbReport ccrb_maximal(const ProblemModel& model, const SparseSignal& signal) {
  model.check(signal);
  if (signal.sparsity() != model.sparsity()) {
    throw Error(ErrorCode::wrong_regime,
                "maximal-support CCRB needs |S| = s (got |S| = " +
                    std::to_string(signal.sparsity()) + ", s = " +
                    std::to_string(model.sparsity()) + ")");
  }
  const double s2 = positive_sigma_x2(model, signal);
  const Matrix G = model.A().gram(signal.support());
  if (is_numerically_singular(G)) {
    throw Error(ErrorCode::singular_submatrix, "A_S^T A_S is singular");
  }
  return rank_one_corrected(cholesky_inverse(G), gather(signal.x(), signal.support()), s2,
                            model, SupportRegime::maximal);
}

CcrbReport ccrb_nonmaximal(const ProblemModel& model, const SparseSignal& signal) {
  model.check(signal);
  if (signal.sparsity() >= model.sparsity()) {
    throw Error(ErrorCode::wrong_regime,
                "nonmaximal-support CCRB needs |S| < s (got |S| = " +
                    std::to_string(signal.sparsity()) + ", s = " +
                    std::to_string(model.sparsity()) + ")");
  }
  const double s2 = positive_sigma_x2(model, signal);

  // The identity gives J = (I + c x x^T) / s2, always nonsingular.
  if (model.A().is_identity()) {
    const Index n = model.n();
    Matrix G_inv = Matrix::Identity(n, n);
    return rank_one_corrected(G_inv, signal.x(), s2, model, SupportRegime::nonmaximal);
  }

  const FisherMatrix fim = fim_closed_form(model, signal);
  if (is_numerically_singular(fim.J)) {
    throw Error(ErrorCode::no_unbiased_estimator,
                "Fisher information is singular: no finite-variance estimator is unbiased "
                "in the neighborhood of x");
  }
  const Matrix G = model.A().gram();
  if (!is_numerically_singular(G)) {
    return rank_one_corrected(cholesky_inverse(G), signal.x(), s2, model,
                              SupportRegime::nonmaximal);
  }
  // A rank deficient but J invertible: no first-term/correction split.
  CcrbReport report;
  report.regime = SupportRegime::nonmaximal;
  report.bound = fim.J.ldlt().solve(Matrix::Identity(model.n(), model.n())).trace();
  report.first_term = report.bound;
  return report;
}

CcrbReport ccrb(const ProblemModel& model, const SparseSignal& signal) {
  model.check(signal);
  return signal.sparsity() == model.sparsity() ? ccrb_maximal(model, signal)
                                               : ccrb_nonmaximal(model, signal);
}

double ccrb_direct(const ProblemModel& model, const SparseSignal& signal) {
  model.check(signal);
  const FisherMatrix fim = fim_closed_form(model, signal);
  if (signal.sparsity() < model.sparsity()) {
    if (is_numerically_singular(fim.J)) {
      throw Error(ErrorCode::no_unbiased_estimator, "Fisher information is singular");
    }
    return pseudo_inverse_symmetric(fim.J).trace();
  }
  const Support& S = signal.support();
  const auto k = static_cast<Index>(S.size());
  Matrix restricted(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      restricted(i, j) = fim.J(S[static_cast<std::size_t>(i)], S[static_cast<std::size_t>(j)]);
    }
  }
  return pseudo_inverse_symmetric(restricted).trace();
}

double oracle_mse_theoretical(const ProblemModel& model, const Support& support,
                              const SparseSignal& signal) {
  model.check(signal);
  const double s2 = sigma_x_squared(model, signal);
  const Matrix G = model.A().gram(support);
  if (support.empty()) return 0.0;
  if (is_numerically_singular(G)) {
    throw Error(ErrorCode::singular_submatrix, "A_S^T A_S is singular");
  }
  return s2 * cholesky_inverse(G).trace();
}

NoiseLevels noise_levels(const ProblemModel& model, const SparseSignal& signal) {
  model.check(signal);
  if (signal.sparsity() == 0) {
    throw Error(ErrorCode::invalid_input, "noise levels need a nonzero signal");
  }
  const auto m = static_cast<double>(model.m());
  const auto s = static_cast<double>(signal.sparsity());
  const double trace = model.A().gram(signal.support()).trace();
  NoiseLevels levels;
  levels.c_e = m * s * model.sigma_e() * model.sigma_e() / trace;
  levels.c_n = m * model.sigma_n() * model.sigma_n() / signal.squared_norm();
  return levels;
}

GammaBounds gamma_bounds(const RipConstants& rip, const NoiseLevels& levels, Index s) {
  if (s < 1) throw Error(ErrorCode::invalid_input, "s must be positive");
  if (!(rip.theta_lower >= 0.0 && rip.theta_lower < 1.0) || !(rip.theta_upper >= 0.0)) {
    throw Error(ErrorCode::domain_error, "RIP constants need 0 <= theta_l < 1, theta_u >= 0");
  }
  const double c_e = levels.c_e;
  const double c_n = levels.c_n;
  if (c_e == 0.0) return {0.0, 0.0};

  // plus/minus are 1 + theta_{+-}: theta_+ = theta_u, theta_- = -theta_l
  const auto side = [&](double same, double opposite) {
    return std::pow(same, 3) / (opposite * opposite) * 2.0 * c_e /
           (2.0 * opposite * c_e + same + c_n / c_e) / static_cast<double>(s);
  };
  const double plus = 1.0 + rip.theta_upper;
  const double minus = 1.0 - rip.theta_lower;
  return {side(minus, plus), side(plus, minus)};
}

double gamma_approx(double c_e, double c_n, Index s) {
  if (s < 1) throw Error(ErrorCode::invalid_input, "s must be positive");
  if (c_e < 0.0 || c_n < 0.0) throw Error(ErrorCode::domain_error, "noise levels must be >= 0");
  if (c_e == 0.0) return 0.0;
  if (std::isinf(c_e)) return 1.0 / static_cast<double>(s);
  return 2.0 * c_e / (2.0 * c_e + 1.0 + c_n / c_e) / static_cast<double>(s);
}

double transition_ce(double c_n) {
  if (!(c_n >= 0.0)) throw Error(ErrorCode::domain_error, "c_n must be >= 0");
  return (1.0 + std::sqrt(1.0 + 8.0 * c_n)) / 4.0;
}

RipConstants rip_constants(const Matrix& A, Index s, const RipOptions& options) {
  if (s < 1 || s > A.cols()) throw Error(ErrorCode::invalid_input, "need 1 <= s <= n");
  const double subsets = binomial(A.cols(), s);
  bool exhaustive = false;
  switch (options.mode) {
    case RipOptions::Mode::exhaustive:
      if (subsets > options.exhaustive_limit) {
        throw Error(ErrorCode::unsupported_size,
                    "C(n, s) exceeds the exhaustive RIP limit");
      }
      exhaustive = true;
      break;
    case RipOptions::Mode::sampled: exhaustive = false; break;
    case RipOptions::Mode::automatic: exhaustive = subsets <= options.exhaustive_limit; break;
  }

  double lambda_min = std::numeric_limits<double>::infinity();
  double lambda_max = -std::numeric_limits<double>::infinity();
  std::int64_t tested = 0;
  Matrix sub(A.rows(), s);
  const auto visit = [&](const Support& S) {
    for (Index j = 0; j < s; ++j) sub.col(j) = A.col(S[static_cast<std::size_t>(j)]);
    const Matrix G = sub.transpose() * sub;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(G, Eigen::EigenvaluesOnly);
    lambda_min = std::min(lambda_min, eig.eigenvalues()(0));
    lambda_max = std::max(lambda_max, eig.eigenvalues()(s - 1));
    ++tested;
    return true;
  };

  if (exhaustive) {
    for_each_combination(A.cols(), s, visit);
  } else {
    RandomStream rng(options.seed);
    for (std::int64_t k = 0; k < std::max<std::int64_t>(1, options.samples); ++k) {
      visit(random_support(A.cols(), s, rng));
    }
  }

  if (!(lambda_min > kSingularTolerance * lambda_max)) {
    throw Error(ErrorCode::assumption_violated,
                "some s-column submatrix is rank deficient (theta_l >= 1)");
  }
  RipConstants rip;
  rip.s = s;
  rip.exact = exhaustive;
  rip.supports_tested = tested;
  rip.theta_lower = std::max(0.0, 1.0 - lambda_min);
  rip.theta_upper = std::max(0.0, lambda_max - 1.0);
  return rip;
}

}  // namespace sparsebound

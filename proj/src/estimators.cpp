#include "sparsebound/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparsebound/error.hpp"
#include "sparsebound/linalg.hpp"

namespace sparsebound {

namespace {

void require_identity(const ProblemModel& model, const char* who) {
  if (!model.A().is_identity()) {
    throw Error(ErrorCode::unsupported_matrix,
                std::string(who) + " is defined for the identity sensing matrix only");
  }
}

Index argmax_abs(const Vector& y) {
  Index best = 0;
  for (Index i = 1; i < y.size(); ++i) {
    if (std::abs(y(i)) > std::abs(y(best))) best = i;
  }
  return best;
}

}  // namespace

std::string estimator_name(const EstimatorSpec& spec) {
  struct Visitor {
    std::string operator()(const OracleEstimator&) const { return "oracle"; }
    std::string operator()(const MaximumLikelihoodEstimator&) const { return "ml"; }
    std::string operator()(const LocallyUnbiasedEstimator&) const { return "locally_unbiased"; }
    std::string operator()(const NoiseExploitingEstimator&) const { return "noise_exploiting"; }
  };
  return std::visit(Visitor{}, spec);
}

SparseSignal estimate_oracle(const ProblemModel& model, const Support& support,
                             const Vector& y) {
  if (y.size() != model.m()) throw Error(ErrorCode::invalid_input, "measurement length != m");
  if (static_cast<Index>(support.size()) > model.sparsity()) {
    throw Error(ErrorCode::invalid_input, "oracle support larger than s");
  }
  const Matrix A_S = model.A().columns(support);
  const Matrix G = A_S.transpose() * A_S;
  if (!support.empty() && is_numerically_singular(G)) {
    throw Error(ErrorCode::singular_submatrix, "A_S^T A_S is singular");
  }
  const Vector coeffs = support.empty() ? Vector(0) : Vector(G.llt().solve(A_S.transpose() * y));
  Vector x = Vector::Zero(model.n());
  for (std::size_t i = 0; i < support.size(); ++i) x(support[i]) = coeffs(static_cast<Index>(i));
  return SparseSignal(std::move(x));
}

SparseSignal estimate_ml_unit(const Vector& y, Index s) {
  if (s < 0 || s > y.size()) throw Error(ErrorCode::invalid_input, "need 0 <= s <= length(y)");
  std::vector<Index> order(static_cast<std::size_t>(y.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + s, order.end(), [&](Index a, Index b) {
    const double ya = std::abs(y(a));
    const double yb = std::abs(y(b));
    return ya > yb || (ya == yb && a < b);
  });
  Vector x = Vector::Zero(y.size());
  for (Index i = 0; i < s; ++i) {
    const Index k = order[static_cast<std::size_t>(i)];
    x(k) = y(k);
  }
  return SparseSignal(std::move(x));
}

Vector estimate_locally_unbiased(const Vector& y, const SparseSignal& x0, double sigma_e,
                                 double sigma_n) {
  if (x0.sparsity() != 1) {
    throw Error(ErrorCode::invalid_input, "locally unbiased estimator needs a 1-sparse x0");
  }
  if (x0.size() != y.size()) throw Error(ErrorCode::invalid_input, "x0 length != length(y)");
  const double s2 = sigma_x_squared(sigma_e, sigma_n, x0.x());
  if (!(s2 > 0.0)) throw Error(ErrorCode::degenerate_model, "sigma_{x0}^2 = 0");
  const Index q = x0.support().front();
  const double x0q = x0.x()(q);
  const double weight = std::exp(-(2.0 * y(q) * x0q + x0q * x0q) / (2.0 * s2));
  Vector out = weight * y;
  out(q) = y(q);
  return out;
}

Vector estimate_locally_unbiased(const Vector& y, const SparseSignal& x0,
                                 const ProblemModel& model) {
  require_identity(model, "the locally unbiased estimator");
  return estimate_locally_unbiased(y, x0, model.sigma_e(), model.sigma_n());
}

SparseSignal estimate_noise_exploiting(const Vector& y) {
  if (y.size() == 0 || (y.array() == 0.0).all()) {
    throw Error(ErrorCode::undefined_support, "y = 0: no support to select");
  }
  const Index k = argmax_abs(y);
  Vector x = Vector::Zero(y.size());
  x(k) = y.squaredNorm() / (2.0 * y(k));
  return SparseSignal(std::move(x));
}

Vector estimate(const EstimatorSpec& spec, const ProblemModel& model, const Vector& y) {
  struct Visitor {
    const ProblemModel& model;
    const Vector& y;
    Vector operator()(const OracleEstimator& e) const {
      return estimate_oracle(model, e.support, y).x();
    }
    Vector operator()(const MaximumLikelihoodEstimator& e) const {
      require_identity(model, "the ML estimator");
      return estimate_ml_unit(y, e.s).x();
    }
    Vector operator()(const LocallyUnbiasedEstimator& e) const {
      require_identity(model, "the locally unbiased estimator");
      return estimate_locally_unbiased(y, e.x0, model.sigma_e(), model.sigma_n());
    }
    Vector operator()(const NoiseExploitingEstimator&) const {
      require_identity(model, "the noise-exploiting estimator");
      return estimate_noise_exploiting(y).x();
    }
  };
  return std::visit(Visitor{model, y}, spec);
}

EstimatorSpec parse_estimator(const std::string& name, const ProblemModel& model,
                              const SparseSignal& truth) {
  if (name == "oracle") return OracleEstimator{truth.support()};
  if (name == "ml") return MaximumLikelihoodEstimator{model.sparsity()};
  if (name == "least_squares") return MaximumLikelihoodEstimator{1};
  if (name == "locally_unbiased") {
    return LocallyUnbiasedEstimator{truth};
  }
  if (name == "noise_exploiting") return NoiseExploitingEstimator{};
  throw Error(ErrorCode::invalid_input, "unknown estimator '" + name + "'");
}

}  // namespace sparsebound

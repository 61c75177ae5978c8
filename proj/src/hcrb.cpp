#include "sparsebound/hcrb.hpp"

#include <cmath>
#include <string>

#include "sparsebound/error.hpp"
#include "sparsebound/linalg.hpp"

namespace sparsebound {

namespace {

/// e^b - 1 - b, accurate for small b.
double expm1_minus_identity(double b) {
  if (std::abs(b) >= 1.0) return std::expm1(b) - b;
  double term = b * b / 2.0;
  double sum = 0.0;
  for (int k = 3; k < 40 && std::abs(term) > 1e-18 * std::abs(sum); ++k) {
    sum += term;
    term *= b / k;
  }
  return sum;
}

}  // namespace

TestPointSet make_test_point_set(const ProblemModel& model, const SparseSignal& signal,
                                 const std::vector<Vector>& offsets) {
  model.check(signal);
  const double s2 = sigma_x_squared(model, signal);
  if (!(s2 > 0.0)) throw Error(ErrorCode::degenerate_model, "sigma_x^2 = 0");
  const double se2 = model.sigma_e() * model.sigma_e();
  const Index n = model.n();
  const auto k = static_cast<Index>(offsets.size());
  const Vector& x = signal.x();

  TestPointSet set;
  set.offsets = offsets;
  set.V.resize(n, k);
  set.H.resize(k, k);
  set.varsigma2.resize(k, k);

  // delta_i = sigma^2_{x+v_i} / sigma_x^2 - 1, Av_i, and sigma^2_{x+v_i}
  Vector delta(k), sigma2(k);
  std::vector<Vector> Av;
  Av.reserve(offsets.size());
  for (Index i = 0; i < k; ++i) {
    const Vector& v = offsets[static_cast<std::size_t>(i)];
    if (v.size() != n) throw Error(ErrorCode::invalid_input, "offset length != n");
    const Vector shifted = x + v;
    const auto nonzeros = (shifted.array() != 0.0).count();
    if (nonzeros > model.sparsity()) {
      throw Error(ErrorCode::infeasible_offset,
                  "x + v_" + std::to_string(i) + " has " + std::to_string(nonzeros) +
                      " nonzeros, more than s = " + std::to_string(model.sparsity()));
    }
    set.V.col(i) = v;
    delta(i) = se2 * (2.0 * x.dot(v) + v.squaredNorm()) / s2;
    sigma2(i) = s2 * (1.0 + delta(i));
    if (!(sigma2(i) > 0.0)) throw Error(ErrorCode::degenerate_model, "sigma^2_{x+v} = 0");
    Av.push_back(model.A().apply(v));
  }

  const double half_m = 0.5 * static_cast<double>(model.m());
  for (Index i = 0; i < k; ++i) {
    for (Index j = i; j < k; ++j) {
      // 1/varsigma^2 = 1/s_i + 1/s_j - 1/s_x = (1 - delta_i delta_j) / (s_x a_i a_j)
      const double cross = delta(i) * delta(j);
      if (!(cross < 1.0)) {
        throw Error(ErrorCode::divergent_test_point,
                    "varsigma^2 <= 0 for test points " + std::to_string(i) + ", " +
                        std::to_string(j) + ": the H integral diverges");
      }
      const double vs2 = s2 * (1.0 + delta(i)) * (1.0 + delta(j)) / (1.0 - cross);
      const Vector u = Av[static_cast<std::size_t>(i)] / sigma2(i) +
                       Av[static_cast<std::size_t>(j)] / sigma2(j);
      const double exponent = -half_m * std::log1p(-cross) -
                              Av[static_cast<std::size_t>(i)].squaredNorm() / (2.0 * sigma2(i)) -
                              Av[static_cast<std::size_t>(j)].squaredNorm() / (2.0 * sigma2(j)) +
                              0.5 * vs2 * u.squaredNorm();
      set.H(i, j) = set.H(j, i) = std::expm1(exponent);
      set.varsigma2(i, j) = set.varsigma2(j, i) = vs2;
    }
  }
  return set;
}

HcrbGeneral hcrb_general(const ProblemModel& model, const SparseSignal& signal,
                         const std::vector<Vector>& offsets) {
  HcrbGeneral result;
  result.points = make_test_point_set(model, signal, offsets);
  // Offsets of very different lengths give H entries of very different
  // magnitudes; equilibrate before the eigenvalue cutoff of the pseudo-inverse.
  const Matrix& H = result.points.H;
  Vector scale(H.rows());
  for (Index i = 0; i < H.rows(); ++i) scale(i) = H(i, i) > 0.0 ? 1.0 / std::sqrt(H(i, i)) : 1.0;
  const Matrix K = scale.asDiagonal() * H * scale.asDiagonal();
  const Matrix W = result.points.V * scale.asDiagonal();
  Matrix bound = W * pseudo_inverse_symmetric(K) * W.transpose();
  result.covariance_bound = 0.5 * (bound + bound.transpose());
  result.trace = result.covariance_bound.trace();
  return result;
}

double g_function(double beta, Index n, double sigma_e) {
  if (!(beta > 0.0)) throw Error(ErrorCode::domain_error, "g(beta) needs beta > 0");
  if (n < 2) throw Error(ErrorCode::invalid_input, "g(beta) needs n >= 2");
  const double se2 = sigma_e * sigma_e;
  const double factor = 1.0 - 2.0 * se2 * beta;
  const double denom = std::expm1(beta) * (1.0 + 2.0 * static_cast<double>(n) * se2 * se2 * beta);
  if (std::isinf(denom)) return 0.0;
  return beta * factor * factor / denom;
}

double one_minus_g(double beta, Index n, double sigma_e) {
  const double g = g_function(beta, n, sigma_e);
  if (beta >= 1.0) return 1.0 - g;
  // numerator of 1 - g over the common denominator (e^b - 1)(1 + 2 n se^4 b)
  const double se2 = sigma_e * sigma_e;
  const double em1 = std::expm1(beta);
  const double rank = 2.0 * static_cast<double>(n) * se2 * se2 * beta;
  const double numerator = expm1_minus_identity(beta) + em1 * rank +
                           4.0 * se2 * beta * beta * (1.0 - se2 * beta);
  return numerator / (em1 * (1.0 + rank));
}

double beta_of(const SparseSignal& signal, const ProblemModel& model) {
  model.check(signal);
  const auto q = signal.smallest_entry();
  if (!q) throw Error(ErrorCode::domain_error, "beta needs a nonzero signal");
  const double s2 = sigma_x_squared(model, signal);
  if (!(s2 > 0.0)) throw Error(ErrorCode::degenerate_model, "sigma_x^2 = 0");
  const double xq = signal.x()(*q);
  const double beta = xq * xq / s2;
  if (model.sigma_e() > 0.0) {
    // x_q^2 / (sigma_e^2 |x|^2) <= 1 / (|S| sigma_e^2)
    const double cap = 1.0 / (static_cast<double>(signal.sparsity()) * model.sigma_e() *
                              model.sigma_e());
    if (beta > cap * (1.0 + 1e-12)) {
      throw Error(ErrorCode::domain_error, "beta exceeds its cap 1/(s sigma_e^2)");
    }
  }
  return beta;
}

double d_hcrb_factor(Index n, Index s, double beta, double sigma_e) {
  if (s < 1 || s > n) throw Error(ErrorCode::invalid_input, "need 1 <= s <= n");
  if (n == s) return 0.0;
  const double off = static_cast<double>(n - s);
  const double em1 = std::expm1(beta);
  const double decay = std::isinf(em1) ? 0.0 : beta * std::exp(-beta) / em1;
  if (decay == 0.0) return 0.0;
  const double boosted = std::exp(beta) / one_minus_g(beta, n, sigma_e);
  return off * decay * (1.0 - 1.0 / (off + boosted));
}

double d_hcrb(const ProblemModel& model, const SparseSignal& signal) {
  if (!model.A().is_identity()) {
    throw Error(ErrorCode::unsupported_matrix, "closed-form HCRB requires identity matrix");
  }
  if (signal.sparsity() != model.sparsity()) {
    throw Error(ErrorCode::wrong_regime, "closed-form HCRB needs |S| = s");
  }
  return d_hcrb_factor(model.n(), model.sparsity(), beta_of(signal, model), model.sigma_e());
}

HcrbReport hcrb_unit_closed_form(const ProblemModel& model, const SparseSignal& signal) {
  if (!model.A().is_identity()) {
    throw Error(ErrorCode::unsupported_matrix, "closed-form HCRB requires identity matrix");
  }
  model.check(signal);
  if (model.n() < 2) throw Error(ErrorCode::invalid_input, "closed-form HCRB needs n >= 2");
  if (signal.sparsity() != model.sparsity()) {
    throw Error(ErrorCode::wrong_regime,
                "closed-form HCRB needs |S| = s (got |S| = " +
                    std::to_string(signal.sparsity()) + ", s = " +
                    std::to_string(model.sparsity()) + ")");
  }
  const double s2 = sigma_x_squared(model, signal);
  if (!(s2 > 0.0)) throw Error(ErrorCode::degenerate_model, "sigma_x^2 = 0");

  const auto n = static_cast<double>(model.n());
  const auto s = static_cast<double>(model.sparsity());
  const double se2 = model.sigma_e() * model.sigma_e();
  const double rank = 2.0 * n * se2 * se2 * signal.squared_norm();

  HcrbReport report;
  report.beta = beta_of(signal, model);
  report.g_beta = g_function(report.beta, model.n(), model.sigma_e());
  report.support_part = s2 * (s - rank / (s2 + rank));
  report.nonsupport_part =
      s2 * d_hcrb_factor(model.n(), model.sparsity(), report.beta, model.sigma_e());
  report.bound = report.support_part + report.nonsupport_part;
  return report;
}

double transition_sigma_e(Index s) {
  if (s < 1) throw Error(ErrorCode::invalid_input, "s must be positive");
  return 1.0 / std::sqrt(static_cast<double>(s));
}

}  // namespace sparsebound

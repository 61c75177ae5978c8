#include "sparsebound/fisher.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "sparsebound/error.hpp"

namespace sparsebound {

namespace {

double checked_sigma_x2(const ProblemModel& model, const SparseSignal& signal) {
  const double s2 = sigma_x_squared(model, signal);
  if (!(s2 > 0.0)) {
    throw Error(ErrorCode::degenerate_model,
                "sigma_x^2 = 0: the likelihood is degenerate (x = 0 with sigma_n = 0, "
                "or sigma_e = sigma_n = 0)");
  }
  return s2;
}

}  // namespace

FisherMatrix fim_closed_form(const ProblemModel& model, const SparseSignal& signal) {
  const double s2 = checked_sigma_x2(model, signal);
  const double se2 = model.sigma_e() * model.sigma_e();
  const auto m = static_cast<double>(model.m());
  const Vector& x = signal.x();

  Matrix J = model.A().gram();
  J.noalias() += (2.0 * m * se2 * se2 / s2) * (x * x.transpose());
  J /= s2;
  J = 0.5 * (J + J.transpose()).eval();
  return {std::move(J), s2};
}

Vector score(const ProblemModel& model, const SparseSignal& signal, const Vector& y) {
  const double s2 = checked_sigma_x2(model, signal);
  if (y.size() != model.m()) throw Error(ErrorCode::invalid_input, "measurement length != m");
  const double se2 = model.sigma_e() * model.sigma_e();
  const auto m = static_cast<double>(model.m());
  const Vector r = y - model.A().apply(signal.x());
  // d/dx [-(m/2) ln s2 - |r|^2 / (2 s2)] with d s2/dx = 2 sigma_e^2 x
  const double coeff = se2 * (r.squaredNorm() / s2 - m) / s2;
  return model.A().apply_transpose(r) / s2 + coeff * signal.x();
}

double log_likelihood(const ProblemModel& model, const SparseSignal& signal,
                      const Vector& y) {
  const double s2 = checked_sigma_x2(model, signal);
  if (y.size() != model.m()) throw Error(ErrorCode::invalid_input, "measurement length != m");
  const auto m = static_cast<double>(model.m());
  const double r2 = (y - model.A().apply(signal.x())).squaredNorm();
  return -0.5 * m * std::log(2.0 * std::numbers::pi * s2) - r2 / (2.0 * s2);
}

FisherMatrix fim_monte_carlo(const ProblemModel& model, const SparseSignal& signal,
                             std::int64_t samples, std::uint64_t seed,
                             const ParallelOptions& options) {
  const double s2 = checked_sigma_x2(model, signal);
  if (samples < 1) throw Error(ErrorCode::invalid_input, "samples must be >= 1");

  const Index n = model.n();
  std::vector<Matrix> partial(static_cast<std::size_t>(chunk_count(samples, options)),
                              Matrix::Zero(n, n));
  parallel_chunks(samples, options, [&](std::int64_t chunk, std::int64_t begin,
                                        std::int64_t end) {
    auto rng = RandomStream::derive(seed, static_cast<std::uint64_t>(chunk));
    Matrix& acc = partial[static_cast<std::size_t>(chunk)];
    for (std::int64_t i = begin; i < end; ++i) {
      const Vector y = sample_measurement(model, signal, rng);
      const Vector g = score(model, signal, y);
      acc.selfadjointView<Eigen::Lower>().rankUpdate(g);
    }
  });

  Matrix lower = Matrix::Zero(n, n);
  for (const Matrix& p : partial) lower += p;
  Matrix J = lower.selfadjointView<Eigen::Lower>();
  J /= static_cast<double>(samples);
  return {std::move(J), s2};
}

}  // namespace sparsebound

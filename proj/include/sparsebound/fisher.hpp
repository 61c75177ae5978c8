#pragma once

#include <cstdint>

#include "sparsebound/model.hpp"
#include "sparsebound/parallel.hpp"

namespace sparsebound {

struct FisherMatrix {
  Matrix J;          // symmetric n x n
  double sigma_x2;   // the sigma_x^2 the matrix was evaluated at
};

/// J = (A^T A + 2 m sigma_e^4 x x^T / sigma_x^2) / sigma_x^2.
FisherMatrix fim_closed_form(const ProblemModel& model, const SparseSignal& signal);

/// Analytic score: the gradient of ln p(y; x) with respect to x.
Vector score(const ProblemModel& model, const SparseSignal& signal, const Vector& y);

/// ln of the N(A x, sigma_x^2 I) density at y.
double log_likelihood(const ProblemModel& model, const SparseSignal& signal,
                      const Vector& y);

/// Averages score * score^T over `samples` measurements drawn at x.
/// The result depends only on (seed, samples, chunk size), never on the
/// number of threads.
FisherMatrix fim_monte_carlo(const ProblemModel& model, const SparseSignal& signal,
                             std::int64_t samples, std::uint64_t seed,
                             const ParallelOptions& options = {});

}  // namespace sparsebound

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparsebound/estimators.hpp"
#include "sparsebound/model.hpp"
#include "sparsebound/parallel.hpp"

namespace sparsebound {

/// Empirical performance of an estimator at one parameter value.
struct TrialSummary {
  double mse = 0.0;
  Vector bias;                  // mean of (x_hat - x)
  std::int64_t trials = 0;      // requested
  std::int64_t failed = 0;      // estimator errors, excluded from the averages
  std::uint64_t seed = 0;
  double std_error_mse = 0.0;   // sample std of |x_hat - x|^2 over sqrt(successes)
  /// Per-coordinate standard error of `bias`.
  Vector bias_std_error;
};

struct TrialOptions {
  ParallelOptions parallel{};
  /// Abort when more than this fraction of trials fail.
  double max_failure_fraction = 0.01;
};

/// Estimator as a plain function of the measurement (returns a dense estimate).
using EstimatorFn = std::function<Vector(const Vector& y)>;

/// Trial t draws its measurement from RandomStream::derive(seed, t), so the
/// summary is identical for any thread count.
TrialSummary run_trials(const ProblemModel& model, const SparseSignal& signal,
                        const EstimatorSpec& estimator, std::int64_t trials,
                        std::uint64_t seed, const TrialOptions& options = {});

TrialSummary run_trials(const ProblemModel& model, const SparseSignal& signal,
                        const EstimatorFn& estimator, std::int64_t trials,
                        std::uint64_t seed, const TrialOptions& options = {});

using ModelFactory = std::function<ProblemModel(double grid_value)>;
using SignalFactory = std::function<SparseSignal(double grid_value)>;

struct SweepRow {
  std::size_t grid_index = 0;
  double grid_value = 0.0;
  /// Index into the estimator list; empty for bounds-only rows.
  std::optional<std::size_t> estimator_index;
  std::string estimator;
  std::optional<TrialSummary> summary;
  double ccrb = 0.0;        // NaN when the CCRB does not exist
  double hcrb = 0.0;        // NaN unless the closed-form unit-matrix HCRB applies
  double oracle_mse = 0.0;  // sigma_x^2 tr((A_S^T A_S)^{-1}); NaN when undefined
};

/// One row per (grid point, estimator), or one bounds-only row per grid point
/// when `estimators` is empty. All estimators at a grid point see the same
/// measurements (seed derived from the master seed and the grid index).
std::vector<SweepRow> sweep(const ModelFactory& make_model, const SignalFactory& make_signal,
                            std::span<const EstimatorSpec> estimators,
                            std::span<const double> grid, std::int64_t trials,
                            std::uint64_t seed, const TrialOptions& options = {});

}  // namespace sparsebound

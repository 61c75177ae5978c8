#include "sparsebound/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sparsebound/ccrb.hpp"
#include "sparsebound/error.hpp"
#include "sparsebound/hcrb.hpp"

namespace sparsebound {

namespace {

// Running mean / sum of squared deviations, mergeable in a fixed order.
struct Moments {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  Vector err_mean;
  Vector err_m2;
  std::int64_t failed = 0;
  std::string first_failure;

  explicit Moments(Index n) : err_mean(Vector::Zero(n)), err_m2(Vector::Zero(n)) {}

  void add(double sq, const Vector& err) {
    ++count;
    const double d = sq - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (sq - mean);
    const Vector de = err - err_mean;
    err_mean += de / static_cast<double>(count);
    err_m2.array() += de.array() * (err - err_mean).array();
  }

  void merge(const Moments& o) {
    if (o.failed > 0 && first_failure.empty()) first_failure = o.first_failure;
    failed += o.failed;
    if (o.count == 0) return;
    if (count == 0) {
      count = o.count;
      mean = o.mean;
      m2 = o.m2;
      err_mean = o.err_mean;
      err_m2 = o.err_m2;
      return;
    }
    const auto na = static_cast<double>(count);
    const auto nb = static_cast<double>(o.count);
    const double total = na + nb;
    const double d = o.mean - mean;
    mean += d * nb / total;
    m2 += o.m2 + d * d * na * nb / total;
    const Vector de = o.err_mean - err_mean;
    err_mean += de * (nb / total);
    err_m2 += o.err_m2 + de.cwiseProduct(de) * (na * nb / total);
    count += o.count;
  }
};

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

TrialSummary run_trials(const ProblemModel& model, const SparseSignal& signal,
                        const EstimatorFn& estimator, std::int64_t trials,
                        std::uint64_t seed, const TrialOptions& options) {
  model.check(signal);
  if (trials < 1) throw Error(ErrorCode::invalid_input, "trials must be >= 1");
  const Index n = model.n();

  std::vector<Moments> partial(static_cast<std::size_t>(chunk_count(trials, options.parallel)),
                               Moments(n));
  parallel_chunks(trials, options.parallel, [&](std::int64_t chunk, std::int64_t begin,
                                                std::int64_t end) {
    Moments& acc = partial[static_cast<std::size_t>(chunk)];
    for (std::int64_t t = begin; t < end; ++t) {
      auto rng = RandomStream::derive(seed, static_cast<std::uint64_t>(t));
      const Vector y = sample_measurement(model, signal, rng);
      try {
        const Vector err = estimator(y) - signal.x();
        acc.add(err.squaredNorm(), err);
      } catch (const Error& e) {
        if (acc.failed++ == 0) acc.first_failure = e.what();
      }
    }
  });

  Moments total(n);
  for (const Moments& p : partial) total.merge(p);

  if (static_cast<double>(total.failed) > options.max_failure_fraction * static_cast<double>(trials)) {
    throw Error(ErrorCode::too_many_failures,
                std::to_string(total.failed) + " of " + std::to_string(trials) +
                    " trials failed; first failure: " + total.first_failure);
  }

  TrialSummary summary;
  summary.trials = trials;
  summary.failed = total.failed;
  summary.seed = seed;
  summary.mse = total.mean;
  summary.bias = total.err_mean;
  const auto ok = static_cast<double>(total.count);
  if (total.count > 1) {
    summary.std_error_mse = std::sqrt(total.m2 / (ok - 1.0) / ok);
    summary.bias_std_error = (total.err_m2 / (ok - 1.0) / ok).cwiseSqrt();
  } else {
    summary.bias_std_error = Vector::Zero(n);
  }
  return summary;
}

TrialSummary run_trials(const ProblemModel& model, const SparseSignal& signal,
                        const EstimatorSpec& estimator, std::int64_t trials,
                        std::uint64_t seed, const TrialOptions& options) {
  return run_trials(
      model, signal, [&](const Vector& y) { return estimate(estimator, model, y); }, trials,
      seed, options);
}

std::vector<SweepRow> sweep(const ModelFactory& make_model, const SignalFactory& make_signal,
                            std::span<const EstimatorSpec> estimators,
                            std::span<const double> grid, std::int64_t trials,
                            std::uint64_t seed, const TrialOptions& options) {
  if (grid.empty()) throw Error(ErrorCode::invalid_input, "sweep grid is empty");
  std::vector<SweepRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const ProblemModel model = make_model(grid[g]);
    const SparseSignal signal = make_signal(grid[g]);

    SweepRow base;
    base.grid_index = g;
    base.grid_value = grid[g];
    try {
      base.ccrb = ccrb(model, signal).bound;
    } catch (const Error&) {
      base.ccrb = nan();
    }
    base.hcrb = nan();
    if (model.A().is_identity() && model.n() >= 2 &&
        signal.sparsity() == model.sparsity()) {
      base.hcrb = hcrb_unit_closed_form(model, signal).bound;
    }
    base.oracle_mse = nan();
    if (signal.sparsity() > 0) {
      try {
        base.oracle_mse = oracle_mse_theoretical(model, signal.support(), signal);
      } catch (const Error&) {
      }
    }

    if (estimators.empty()) {
      rows.push_back(base);
      continue;
    }
    const std::uint64_t point_seed = splitmix64(seed ^ splitmix64(g + 1));
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      SweepRow row = base;
      row.estimator_index = e;
      row.estimator = estimator_name(estimators[e]);
      row.summary = run_trials(model, signal, estimators[e], trials, point_seed, options);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace sparsebound

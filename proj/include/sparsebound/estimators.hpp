#pragma once

#include <string>
#include <variant>

#include "sparsebound/model.hpp"

namespace sparsebound {

/// Least squares on a known support.
struct OracleEstimator {
  Support support;
};

/// Unit-matrix maximum likelihood: keep the s largest magnitudes.
struct MaximumLikelihoodEstimator {
  Index s = 1;
};

/// Unit-matrix, s = 1 estimator that is unbiased around the 1-sparse x0.
/// Noise levels come from the model it is applied under.
struct LocallyUnbiasedEstimator {
  SparseSignal x0;
};

/// Unit-matrix, s = 1 estimator that reads the signal amplitude off the
/// total energy of y.
struct NoiseExploitingEstimator {};

using EstimatorSpec = std::variant<OracleEstimator, MaximumLikelihoodEstimator,
                                   LocallyUnbiasedEstimator, NoiseExploitingEstimator>;

/// Short identifier: oracle, ml, locally_unbiased, noise_exploiting.
std::string estimator_name(const EstimatorSpec& spec);

/// x_S = A_S^+ y, zero elsewhere.
SparseSignal estimate_oracle(const ProblemModel& model, const Support& support,
                             const Vector& y);

/// P_s(y). Equal magnitudes resolve to the lower index.
SparseSignal estimate_ml_unit(const Vector& y, Index s);

/// Dense output: y_q at the support index q of x0, and
/// y_k exp(-(2 y_q x0_q + x0_q^2) / (2 sigma_{x0}^2)) elsewhere.
Vector estimate_locally_unbiased(const Vector& y, const SparseSignal& x0,
                                 const ProblemModel& model);
Vector estimate_locally_unbiased(const Vector& y, const SparseSignal& x0, double sigma_e,
                                 double sigma_n);

/// 1-sparse output at k = argmax |y_k| with value sum_j y_j^2 / (2 y_k).
SparseSignal estimate_noise_exploiting(const Vector& y);

/// Applies any estimator and returns the dense estimate.
Vector estimate(const EstimatorSpec& spec, const ProblemModel& model, const Vector& y);

/// Parses oracle | ml | locally_unbiased | noise_exploiting | least_squares for
/// a given true signal (the oracle uses its support, the locally unbiased
/// estimator is centred at it, least_squares is ml with s = 1).
EstimatorSpec parse_estimator(const std::string& name, const ProblemModel& model,
                              const SparseSignal& truth);

}  // namespace sparsebound

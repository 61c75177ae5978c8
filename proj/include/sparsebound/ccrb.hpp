#pragma once

#include <cstdint>
#include <string_view>

#include "sparsebound/model.hpp"

namespace sparsebound {

enum class SupportRegime { maximal, nonmaximal };

std::string_view to_string(SupportRegime regime) noexcept;

/// Constrained Cramer-Rao bound with its decomposition
/// bound = first_term - d_ccrb, gamma_ccrb = d_ccrb / first_term.
struct CcrbReport {
  double bound = 0.0;
  double first_term = 0.0;
  double d_ccrb = 0.0;
  double gamma_ccrb = 0.0;
  SupportRegime regime = SupportRegime::maximal;
};

/// Normalized perturbation and measurement-noise levels of an instance.
struct NoiseLevels {
  double c_e = 0.0;  // m s sigma_e^2 / tr(A_S^T A_S)
  double c_n = 0.0;  // m sigma_n^2 / ||x||^2
};

/// Asymmetric restricted-isometry constants:
/// (1 - theta_lower) |x|^2 <= |A x|^2 <= (1 + theta_upper) |x|^2 on s-sparse x.
struct RipConstants {
  double theta_lower = 0.0;
  double theta_upper = 0.0;
  Index s = 0;
  bool exact = false;  // false: maximized over a random sample of supports only
  std::int64_t supports_tested = 0;
};

struct RipOptions {
  enum class Mode { automatic, exhaustive, sampled };
  Mode mode = Mode::automatic;
  /// Supports drawn in sampled mode.
  std::int64_t samples = 2000;
  /// automatic mode enumerates when C(n, s) does not exceed this.
  double exhaustive_limit = 1e5;
  std::uint64_t seed = 0;
};

struct GammaBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Maximal support (|S| = s). Cholesky on A_S^T A_S plus the rank-one
/// correction in closed form.
CcrbReport ccrb_maximal(const ProblemModel& model, const SparseSignal& signal);

/// Nonmaximal support (|S| < s): tr(J^{-1}). Uses the closed form when A has
/// full column rank, otherwise a direct inverse of J with d_ccrb reported as 0.
CcrbReport ccrb_nonmaximal(const ProblemModel& model, const SparseSignal& signal);

/// Dispatches on |S| == s.
CcrbReport ccrb(const ProblemModel& model, const SparseSignal& signal);

/// Independent route: tr((V^T J V)^+) with J from the Fisher module and V the
/// canonical basis of the feasible directions. Used to cross-check the above.
double ccrb_direct(const ProblemModel& model, const SparseSignal& signal);

/// MSE of the least-squares estimator that knows the support:
/// sigma_x^2 tr((A_S^T A_S)^{-1}).
double oracle_mse_theoretical(const ProblemModel& model, const Support& support,
                              const SparseSignal& signal);

NoiseLevels noise_levels(const ProblemModel& model, const SparseSignal& signal);

/// Two-sided bound on gamma_ccrb in terms of the RIP constants and the noise
/// levels. Both sides are 0 when c_e = 0.
GammaBounds gamma_bounds(const RipConstants& rip, const NoiseLevels& levels, Index s);

/// (1/s) 2 c_e / (2 c_e + 1 + c_n / c_e); 0 at c_e = 0.
double gamma_approx(double c_e, double c_n, Index s);

/// The c_e at which gamma_approx reaches half its ceiling, 1/(2s):
/// the positive root of 2 c^2 - c - c_n = 0.
double transition_ce(double c_n);

RipConstants rip_constants(const Matrix& A, Index s, const RipOptions& options = {});

}  // namespace sparsebound

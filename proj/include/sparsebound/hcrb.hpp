#pragma once

#include <vector>

#include "sparsebound/model.hpp"

namespace sparsebound {

/// Test points x + v_i of a Hammersley-Chapman-Robbins bound together with
/// the derived matrices.
struct TestPointSet {
  std::vector<Vector> offsets;  // the v_i
  Matrix V;                     // n x k, columns v_i
  Matrix H;                     // k x k, E[(delta_i p / p)(delta_j p / p)]
  Matrix varsigma2;             // k x k, varsigma^2_{x, v_i, v_j}
};

/// Lower bound V H^+ V^T on the covariance of any globally unbiased estimator.
struct HcrbGeneral {
  TestPointSet points;
  Matrix covariance_bound;
  double trace = 0.0;
};

/// Closed-form unit-matrix HCRB, split into the part on the support (equal to
/// the maximal-support CCRB) and the part off the support.
struct HcrbReport {
  double bound = 0.0;
  double support_part = 0.0;
  double nonsupport_part = 0.0;
  double beta = 0.0;    // x_q^2 / sigma_x^2
  double g_beta = 0.0;
};

/// Builds the test point set, checking feasibility of every x + v_i and
/// convergence of every H integral.
TestPointSet make_test_point_set(const ProblemModel& model, const SparseSignal& signal,
                                 const std::vector<Vector>& offsets);

HcrbGeneral hcrb_general(const ProblemModel& model, const SparseSignal& signal,
                         const std::vector<Vector>& offsets);

/// Requires A = I (m = n >= 2) and |S| = s.
HcrbReport hcrb_unit_closed_form(const ProblemModel& model, const SparseSignal& signal);

/// g(beta) = beta (1 - 2 sigma_e^2 beta)^2 / ((e^beta - 1)(1 + 2 n sigma_e^4 beta)).
double g_function(double beta, Index n, double sigma_e);

/// 1 - g(beta), evaluated without cancellation for small beta.
double one_minus_g(double beta, Index n, double sigma_e);

/// Worst-case entry SNR x_q^2 / sigma_x^2.
double beta_of(const SparseSignal& signal, const ProblemModel& model);

/// The off-support factor of the unit-matrix HCRB (nonsupport_part / sigma_x^2):
/// (n - s) beta e^-beta / (e^beta - 1) * (1 - 1 / (n - s + e^beta / (1 - g))).
double d_hcrb(const ProblemModel& model, const SparseSignal& signal);

/// Same factor from its scalar ingredients.
double d_hcrb_factor(Index n, Index s, double beta, double sigma_e);

/// 1 / sqrt(s): the perturbation level separating the regimes where the HCRB
/// does or does not fall back to the CCRB for large entries.
double transition_sigma_e(Index s);

}  // namespace sparsebound

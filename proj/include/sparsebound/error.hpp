#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsebound {

/// Failure categories raised by the library. Every category except
/// `invalid_input` denotes a mathematical condition rather than misuse.
enum class ErrorCode {
  invalid_input,
  degenerate_model,       // sigma_x^2 == 0 where a likelihood is needed
  singular_submatrix,     // A_S^T A_S not invertible
  wrong_regime,           // maximal vs nonmaximal support mismatch
  no_unbiased_estimator,  // singular FIM in the nonmaximal case
  divergent_test_point,   // varsigma^2 <= 0 for some offset pair
  infeasible_offset,      // x + v leaves the sparse set
  unsupported_matrix,     // closed-form HCRB on a non-identity matrix
  unsupported_size,       // exhaustive search too large
  domain_error,
  assumption_violated,    // RIP lower constant >= 1
  undefined_support,      // estimator cannot pick a support (y == 0)
  too_many_failures,      // Monte Carlo trials failed above the threshold
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sparsebound

#include "sparsebound/error.hpp"

namespace sparsebound {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::degenerate_model: return "degenerate_model";
    case ErrorCode::singular_submatrix: return "singular_submatrix";
    case ErrorCode::wrong_regime: return "wrong_regime";
    case ErrorCode::no_unbiased_estimator: return "no_unbiased_estimator";
    case ErrorCode::divergent_test_point: return "divergent_test_point";
    case ErrorCode::infeasible_offset: return "infeasible_offset";
    case ErrorCode::unsupported_matrix: return "unsupported_matrix";
    case ErrorCode::unsupported_size: return "unsupported_size";
    case ErrorCode::domain_error: return "domain_error";
    case ErrorCode::assumption_violated: return "assumption_violated";
    case ErrorCode::undefined_support: return "undefined_support";
    case ErrorCode::too_many_failures: return "too_many_failures";
  }
  return "unknown";
}

}  // namespace sparsebound

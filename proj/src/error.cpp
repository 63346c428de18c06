#include "bochner/error.hpp"

namespace bochner {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_spec: return "invalid-spec";
    case ErrorCode::empty_target: return "empty-target";
    case ErrorCode::positivity_violation: return "positivity-violation";
    case ErrorCode::quantization: return "quantization";
    case ErrorCode::unsupported_gauge: return "unsupported-gauge";
    case ErrorCode::bundle_inconsistency: return "bundle-inconsistency";
    case ErrorCode::consistency: return "consistency";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::degeneracy: return "degeneracy";
    case ErrorCode::empty_region: return "empty-region";
    case ErrorCode::invalid_window: return "invalid-window";
    case ErrorCode::empty_set: return "empty-set";
    case ErrorCode::size: return "size";
    case ErrorCode::flag: return "flag";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::factorization: return "factorization";
    case ErrorCode::invalid_rate: return "invalid-rate";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::support: return "support";
    case ErrorCode::invalid_data: return "invalid-data";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace bochner

#include "wkappa/error.hpp"

namespace wkappa {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ingestion: return "ingestion";
    case ErrorCode::NonEstimable: return "non-estimable";
    case ErrorCode::UndefinedKappa: return "undefined-kappa";
    case ErrorCode::InfeasibleScenario: return "infeasible-scenario";
    case ErrorCode::DegenerateVariance: return "degenerate-variance";
    case ErrorCode::RatioUndefined: return "ratio-undefined";
    case ErrorCode::LogUndefined: return "log-undefined";
    case ErrorCode::FiellerInvalid: return "fieller-invalid";
    case ErrorCode::InversionUndefined: return "inversion-undefined";
    case ErrorCode::BootstrapFailed: return "bootstrap-failed";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::UnsupportedNominal: return "unsupported-nominal";
    case ErrorCode::Usage: return "usage";
  }
  return "unknown";
}

}  // namespace wkappa

#include "vcs/error.hpp"

namespace vcs {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::insufficient_samples: return "insufficient_samples";
    case ErrorCode::degenerate_geometry: return "degenerate_geometry";
    case ErrorCode::coverage: return "coverage";
    case ErrorCode::topology: return "topology";
    case ErrorCode::disconnected_lumen: return "disconnected_lumen";
    case ErrorCode::degenerate_frame: return "degenerate_frame";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::validity: return "validity";
    case ErrorCode::star_convexity: return "star_convexity";
    case ErrorCode::model: return "model";
    case ErrorCode::layout: return "layout";
    case ErrorCode::cardinality: return "cardinality";
    case ErrorCode::spec: return "spec";
    case ErrorCode::input: return "input";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

}  // namespace vcs

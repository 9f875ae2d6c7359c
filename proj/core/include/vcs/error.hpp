#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vcs {

/// Failure categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorCode {
  domain,                // parameter outside its domain
  insufficient_samples,  // least-squares system is underdetermined
  degenerate_geometry,   // rank-deficient design matrix
  coverage,              // an angular/longitudinal band has no samples
  topology,              // mesh is not watertight after capping
  disconnected_lumen,    // no route between the seeds
  degenerate_frame,      // initial frame cannot be derived from the wall centroid
  precondition,          // caller broke a documented precondition
  validity,              // too many points outside the coordinate validity region
  star_convexity,        // fitted wall radius is not positive
  model,                 // non-positive wall radius when normalizing
  layout,                // feature-vector / grid layout mismatch
  cardinality,           // not enough items in a collection
  spec,                  // invalid synthetic vessel description
  input,                 // empty or unusable input
  parse,                 // malformed file
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace vcs

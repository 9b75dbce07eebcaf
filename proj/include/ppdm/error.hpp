#pragma once

#include <stdexcept>
#include <string>

namespace ppdm {

/// Stable, machine-parsable failure classes. The CLI prints `code_name()`.
enum class ErrorCode {
  kInvalidArgument,
  kUnknownEntity,
  kInvalidBody,
  kRobustnessFailure,
  kDegenerateConstraint,
  kNonManifoldVertex,
  kInternalInvariant,
  kSchema,
  kVersionMismatch,
  kUnsupported,
};

const char* code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ppdm

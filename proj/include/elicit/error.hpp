#pragma once

#include <stdexcept>
#include <string>

namespace elicit {

enum class ErrorCode {
  InvalidArgument = 1,
  NotFound,
  Conflict,          // duplicate or out-of-order submission
  ForbiddenRelation, // relation not offered under the question's treatment
  InvalidState,
  Domain,
  Io,
  Parse,
  Unauthorized,      // admin route without a valid bearer token
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace elicit

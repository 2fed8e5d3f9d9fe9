#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tracerank {

enum class ErrorCode {
  InvalidArgument,   // bad parameter or malformed in-memory input
  Parse,             // malformed file content (message carries file:line)
  Io,                // unreadable/unwritable path
  NotConverged,      // iteration cap exhausted
  UnknownAddress,
  DimensionMismatch,
  TooLarge,          // dense-solve guard tripped
  EmptyIndex,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, std::string message) {
  throw Error(code, std::move(message));
}

}  // namespace tracerank

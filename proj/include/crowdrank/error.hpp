#pragma once

#include <stdexcept>
#include <string>

namespace crowdrank {

/// Failure categories. The CLI maps each one to a fixed exit code.
enum class ErrorKind {
  kParameter,        // invalid argument or configuration
  kData,             // malformed or inconsistent input data
  kNotIdentifiable,  // bipartite component, skills not recoverable
  kNumerical,        // divergence, overflow, NaN
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace crowdrank

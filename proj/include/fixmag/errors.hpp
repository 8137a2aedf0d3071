#pragma once

#include <stdexcept>
#include <string>

namespace fixmag {

/// Broad failure classes. The CLI maps each one onto a stable exit code.
enum class ErrorKind {
  invalid_argument,  // malformed input or violated precondition
  capacity,          // exact enumeration requested beyond the configured cap
  regime,            // parameters outside the tractable regime of an algorithm
  sampler_failure,   // a stochastic backend could not deliver
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

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::invalid_argument, what);
}

}  // namespace fixmag

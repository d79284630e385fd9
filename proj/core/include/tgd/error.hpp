#pragma once

#include <stdexcept>
#include <string>

namespace tgd {

// Error categories map onto the tool's exit codes: invalid input data
// (algebra axioms, parse errors, model mismatches) is distinct from a
// negative duality verdict, and from unmet builder preconditions.
enum class ErrorKind {
  InvalidInput,   // malformed scenario, axiom violation, model mismatch
  Precondition,   // a construction's hypotheses are not satisfied
  Internal,       // invariant broken inside the library: always a bug
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& msg) {
  throw Error(ErrorKind::InvalidInput, msg);
}
[[noreturn]] inline void fail_precondition(const std::string& msg) {
  throw Error(ErrorKind::Precondition, msg);
}
[[noreturn]] inline void fail_internal(const std::string& msg) {
  throw Error(ErrorKind::Internal, msg);
}

}  // namespace tgd

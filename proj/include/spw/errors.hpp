#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spw {

/// A state would lose norm because its support exceeds the Fock cutoff.
class CutoffOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical routine failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Semidefinite solver failure carrying the per-iteration trace.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<std::string> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  std::vector<std::string> trace_;
};

}  // namespace spw

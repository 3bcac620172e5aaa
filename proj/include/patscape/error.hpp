#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace patscape {

// Input data violates a contract (schema, registry, precondition).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical procedure failed (non-convergence, separation, singularity).
class EstimationError : public std::runtime_error {
 public:
  explicit EstimationError(const std::string& what, std::vector<double> trace = {})
      : std::runtime_error(what), trace_(std::move(trace)) {}

  // Objective value per iteration up to the failure.
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

// Invalid command-line usage; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace patscape

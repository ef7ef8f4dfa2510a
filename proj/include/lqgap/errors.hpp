#pragma once

#include <stdexcept>
#include <string>

namespace lqgap {

// Bad input: dimension mismatches, malformed configs, failed preconditions.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable game file.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A stage matrix (P_t or Lambda_t) of a Riccati recursion is numerically
// singular, i.e. the invertibility assumption behind equilibrium uniqueness
// fails at stage `stage` (1-based).
struct SingularStageMatrix : std::runtime_error {
  int stage;
  double condition;

  SingularStageMatrix(int stage_in, double condition_in, const std::string& what_arg)
      : std::runtime_error(what_arg), stage(stage_in), condition(condition_in) {}
};

// The stacked stationarity system of the open-loop oracle is singular.
struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A test-instrument size guard tripped (the dense oracle is not meant for
// large problems).
struct SizeGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lqgap

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ridgelab {

using Vec = std::vector<double>;

// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch coarsely; the distinct types exist because tests distinguish them.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateLinkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BallViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivergentIntegrandError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientSuccessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ridgelab

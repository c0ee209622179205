#pragma once

#include <stdexcept>
#include <string>

namespace tailbench {

// Input outside the mathematical domain of an operation.
struct DomainError : std::domain_error
{
  using std::domain_error::domain_error;
};

// Sample carries no information for the requested statistic (ties, zero spread).
struct DegenerateSampleError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Fewer than two observations above a POT threshold.
struct InsufficientExceedancesError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Kernel survival estimate at the threshold is numerically zero.
struct NoExceedanceError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Inconsistent simulation or CLI configuration, detected before any work is done.
struct ConfigError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

// A file could not be opened, read or written.
struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

} // namespace tailbench

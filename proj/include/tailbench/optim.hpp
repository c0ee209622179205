#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace tailbench {

struct SimplexOptions
{
  std::size_t max_iterations = 500;
  // Converged when every vertex lies within this distance (max-norm) of the best.
  double tolerance = 1e-10;
  // Edge length of the initial simplex along each axis.
  double initial_step = 0.1;
};

struct SimplexResult
{
  std::vector<double> argmin;
  double value;
  std::size_t iterations;
  bool converged;
};

// Nelder-Mead minimization with standard coefficients (reflect 1, expand 2,
// contract 1/2, shrink 1/2). Nonfinite objective values are treated as +inf,
// so a penalty of infinity marks infeasible points.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const SimplexOptions& options = {});

} // namespace tailbench

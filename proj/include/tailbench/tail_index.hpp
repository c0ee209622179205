#pragma once

#include "tailbench/distributions.hpp"

#include <cstddef>
#include <optional>
#include <span>

namespace tailbench {

// Hill-type estimate of the Hall-class pair (A, alpha) from the r largest
// order statistics.
struct TailIndexEstimate
{
  double alpha_hat;
  double A_hat;
  std::size_t r;
  std::size_t n;
};

// alpha_hat = [ (1/r) sum_{j=1..r} ln X_(n-j+1) - ln X_(n-r) ]^{-1},
// A_hat = (r/n) X_(n-r)^alpha_hat.
// Throws DomainError when r is out of range or one of the r+1 largest
// observations is nonpositive, DegenerateSampleError when the top values tie.
TailIndexEstimate hill_fit(std::span<const double> sample, std::size_t r);

// Same as hill_fit, for a sample already sorted ascending.
TailIndexEstimate hill_fit_sorted(std::span<const double> sorted, std::size_t r);

// round(n^{2/3}) clamped to [1, n-1].
std::size_t default_r(std::size_t n);

// Constant s of the variance-optimal r ~ s n^{2 beta/(alpha + 2 beta)}.
double optimal_r_constant(const HallParams& params);

// round(s n^{2 beta/(alpha + 2 beta)}) clamped to [1, n-1]; s defaults to
// optimal_r_constant(params).
std::size_t theoretical_r(const HallParams& params, std::size_t n, std::optional<double> s = {});

} // namespace tailbench

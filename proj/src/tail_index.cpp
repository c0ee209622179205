#include "tailbench/tail_index.hpp"

#include "tailbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tailbench {

namespace {

// Half-to-even rounding (the default floating-point environment) then clamp.
std::size_t round_clamp(double v, std::size_t n)
{
  const double rounded = std::nearbyint(v);
  const double hi = static_cast<double>(n - 1);
  return static_cast<std::size_t>(std::clamp(rounded, 1.0, hi));
}

} // namespace

TailIndexEstimate hill_fit_sorted(std::span<const double> sorted, std::size_t r)
{
  const std::size_t n = sorted.size();
  if (r < 1 || r >= n)
    throw DomainError("hill_fit requires 1 <= r < n");
  const double pivot = sorted[n - r - 1];
  if (!(pivot > 0.0))
    throw DomainError("hill_fit requires the r+1 largest observations to be positive");

  const double log_pivot = std::log(pivot);
  double sum = 0.0;
  for (std::size_t j = n - r; j < n; ++j)
    sum += std::log(sorted[j]) - log_pivot;
  const double mean_excess = sum / static_cast<double>(r);
  if (!(mean_excess > 0.0))
    throw DegenerateSampleError("top order statistics are tied; tail index is undefined");

  const double alpha_hat = 1.0 / mean_excess;
  const double A_hat = static_cast<double>(r) / static_cast<double>(n) * std::pow(pivot, alpha_hat);
  return { alpha_hat, A_hat, r, n };
}

TailIndexEstimate hill_fit(std::span<const double> sample, std::size_t r)
{
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  return hill_fit_sorted(sorted, r);
}

std::size_t default_r(std::size_t n)
{
  if (n < 2)
    throw DomainError("default_r requires n >= 2");
  const double cube_root = std::cbrt(static_cast<double>(n));
  return round_clamp(cube_root * cube_root, n);
}

double optimal_r_constant(const HallParams& p)
{
  const double denom = p.alpha + 2.0 * p.beta;
  const double inner = p.alpha * (p.alpha + p.beta) * (p.alpha + p.beta) / (2.0 * p.beta * p.beta * p.beta);
  return std::pow(p.A, 2.0 * p.beta / denom) * std::pow(p.B * p.B, -p.alpha / denom) *
         std::pow(inner, p.alpha / denom);
}

std::size_t theoretical_r(const HallParams& params, std::size_t n, std::optional<double> s)
{
  if (n < 2)
    throw DomainError("theoretical_r requires n >= 2");
  const double constant = s.value_or(optimal_r_constant(params));
  if (!(constant > 0.0))
    throw DomainError("r constant must be positive");
  const double exponent = 2.0 * params.beta / (params.alpha + 2.0 * params.beta);
  return round_clamp(constant * std::pow(static_cast<double>(n), exponent), n);
}

} // namespace tailbench

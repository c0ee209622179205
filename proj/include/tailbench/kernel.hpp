#pragma once

#include "tailbench/distributions.hpp"
#include "tailbench/tail_index.hpp"

#include <span>
#include <string_view>

namespace tailbench {

// Symmetric kernel density w, its CDF W and the two moment constants that
// enter every bandwidth formula: mu2 = int z^2 w(z) dz, psi = int z W(z) w(z) dz.
struct KernelSpec
{
  double (*w)(double);
  double (*W)(double);
  double mu2;
  double psi;
};

// Standard normal kernel: mu2 = 1, psi = 1/(2 sqrt(pi)).
const KernelSpec& gaussian_kernel();

enum class BandwidthMethod
{
  PointwiseTrue,
  PointwisePlugin,
  GlobalAL,
  MefTrue,
  MefPlugin,
  Fixed
};

std::string_view to_string(BandwidthMethod m);

struct Bandwidth
{
  double h;
  BandwidthMethod method;
  // false when the formula's own validity condition (h -> 0) is violated
  bool valid = true;
  // true when h was capped at the sample range
  bool capped = false;
};

Bandwidth fixed_bandwidth(double h);

// (1/n) sum W((x - X_i)/h), unclamped.
double kernel_cdf_raw(std::span<const double> sample, double x, const Bandwidth& h,
                      const KernelSpec& k = gaussian_kernel());

// kernel_cdf_raw clamped to [0, 1].
double kernel_cdf(std::span<const double> sample, double x, const Bandwidth& h,
                  const KernelSpec& k = gaussian_kernel());

// Survival estimate 1 - F_hat(x) evaluated as (1/n) sum W((X_i - x)/h), which
// keeps relative precision far in the upper tail.
double kernel_tail_raw(std::span<const double> sample, double x, const Bandwidth& h,
                       const KernelSpec& k = gaussian_kernel());

// (1/(n h)) sum w((x - X_i)/h).
double kernel_density(std::span<const double> sample, double x, const Bandwidth& h,
                      const KernelSpec& k = gaussian_kernel());

// Pointwise MSE-optimal bandwidth for a Hall-class tail at x:
//   h = n^{-1/3} {2 A^{-1} alpha^{-1} (alpha+1)^{-2} x^{alpha+3}}^{1/3} (psi/mu2^2)^{1/3}.
// valid is false when x^{alpha+3} / n >= 1.
Bandwidth pointwise_bandwidth_true(const HallParams& params, std::size_t n, double x,
                                   const KernelSpec& k = gaussian_kernel());

// pointwise_bandwidth_true with the Hill-type (A_hat, alpha_hat) substituted.
Bandwidth pointwise_bandwidth_plugin(const TailIndexEstimate& est, std::size_t n, double x,
                                     const KernelSpec& k = gaussian_kernel());

// Global MISE-targeting bandwidth h = n^{-1/3} (2 psi / (mu2^2 R))^{1/3} with
// R = int (f')^2 estimated from a normal-reference pilot density on a 1024-point grid.
Bandwidth al_bandwidth(std::span<const double> sample, const KernelSpec& k = gaussian_kernel());

// Mean-excess MSE-optimal bandwidth for a Hall-class tail:
//   h* = n^{-1/3} u^{1 + alpha/3} (psi / (2 A alpha mu2^2))^{1/3}.
Bandwidth mef_bandwidth_true(const HallParams& params, std::size_t n, double u,
                             const KernelSpec& k = gaussian_kernel());

Bandwidth mef_bandwidth_plugin(const TailIndexEstimate& est, std::size_t n, double u,
                               const KernelSpec& k = gaussian_kernel());

// Caps h at max(sample) - min(sample) and marks the bandwidth as capped.
Bandwidth cap_to_range(Bandwidth h, std::span<const double> sample);

// Kernel mean-excess estimate with Gaussian kernel in closed form:
//   {1 - F_hat(u)}^{-1} n^{-1} sum {(X_i - u) Phi((X_i - u)/h) + h phi((X_i - u)/h)}.
// Throws NoExceedanceError when 1 - F_hat(u) <= 1e-12.
double kernel_mef(std::span<const double> sample, double u, const Bandwidth& h);

} // namespace tailbench

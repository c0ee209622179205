#include "tailbench/kernel.hpp"

#include "tailbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace tailbench {

namespace {

double std_normal_pdf(double z)
{
  return std::exp(-0.5 * z * z) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double std_normal_cdf(double z)
{
  return 0.5 * std::erfc(-z * (0.5 * std::numbers::sqrt2));
}

void require_bandwidth(const Bandwidth& h)
{
  if (!(h.h > 0.0) || !std::isfinite(h.h))
    throw DomainError("bandwidth must be positive and finite");
}

void require_nonempty(std::span<const double> sample)
{
  if (sample.empty())
    throw DomainError("kernel estimators need at least one observation");
}

Bandwidth hall_pointwise(double A, double alpha, std::size_t n, double x, const KernelSpec& k,
                         BandwidthMethod method)
{
  if (!(x > 0.0))
    throw DomainError("pointwise bandwidth requires x > 0");
  const double nd = static_cast<double>(n);
  const double growth = std::pow(x, alpha + 3.0);
  const double core = 2.0 / (A * alpha * (alpha + 1.0) * (alpha + 1.0)) * growth;
  const double h = std::cbrt(core / nd) * std::cbrt(k.psi / (k.mu2 * k.mu2));
  return { h, method, growth / nd < 1.0, false };
}

Bandwidth hall_mef(double A, double alpha, std::size_t n, double u, const KernelSpec& k,
                   BandwidthMethod method)
{
  if (!(u > 0.0))
    throw DomainError("mean-excess bandwidth requires u > 0");
  const double nd = static_cast<double>(n);
  const double h = std::pow(u, 1.0 + alpha / 3.0) * std::cbrt(k.psi / (2.0 * A * alpha * k.mu2 * k.mu2) / nd);
  return { h, method, std::pow(u, alpha + 3.0) / nd < 1.0, false };
}

} // namespace

const KernelSpec& gaussian_kernel()
{
  static const KernelSpec spec{ &std_normal_pdf, &std_normal_cdf, 1.0, 0.5 * std::numbers::inv_sqrtpi };
  return spec;
}

std::string_view to_string(BandwidthMethod m)
{
  switch (m) {
    case BandwidthMethod::PointwiseTrue:
      return "pointwise_true";
    case BandwidthMethod::PointwisePlugin:
      return "pointwise_plugin";
    case BandwidthMethod::GlobalAL:
      return "global_al";
    case BandwidthMethod::MefTrue:
      return "mef_true";
    case BandwidthMethod::MefPlugin:
      return "mef_plugin";
    case BandwidthMethod::Fixed:
      return "fixed";
  }
  return "unknown";
}

Bandwidth fixed_bandwidth(double h)
{
  Bandwidth b{ h, BandwidthMethod::Fixed, true, false };
  require_bandwidth(b);
  return b;
}

double kernel_cdf_raw(std::span<const double> sample, double x, const Bandwidth& h, const KernelSpec& k)
{
  require_bandwidth(h);
  require_nonempty(sample);
  double sum = 0.0;
  for (double xi : sample)
    sum += k.W((x - xi) / h.h);
  return sum / static_cast<double>(sample.size());
}

double kernel_cdf(std::span<const double> sample, double x, const Bandwidth& h, const KernelSpec& k)
{
  return std::clamp(kernel_cdf_raw(sample, x, h, k), 0.0, 1.0);
}

double kernel_tail_raw(std::span<const double> sample, double x, const Bandwidth& h, const KernelSpec& k)
{
  require_bandwidth(h);
  require_nonempty(sample);
  double sum = 0.0;
  for (double xi : sample)
    sum += k.W((xi - x) / h.h);
  return sum / static_cast<double>(sample.size());
}

double kernel_density(std::span<const double> sample, double x, const Bandwidth& h, const KernelSpec& k)
{
  require_bandwidth(h);
  require_nonempty(sample);
  double sum = 0.0;
  for (double xi : sample)
    sum += k.w((x - xi) / h.h);
  return sum / (static_cast<double>(sample.size()) * h.h);
}

Bandwidth pointwise_bandwidth_true(const HallParams& params, std::size_t n, double x, const KernelSpec& k)
{
  return hall_pointwise(params.A, params.alpha, n, x, k, BandwidthMethod::PointwiseTrue);
}

Bandwidth pointwise_bandwidth_plugin(const TailIndexEstimate& est, std::size_t n, double x, const KernelSpec& k)
{
  return hall_pointwise(est.A_hat, est.alpha_hat, n, x, k, BandwidthMethod::PointwisePlugin);
}

Bandwidth mef_bandwidth_true(const HallParams& params, std::size_t n, double u, const KernelSpec& k)
{
  return hall_mef(params.A, params.alpha, n, u, k, BandwidthMethod::MefTrue);
}

Bandwidth mef_bandwidth_plugin(const TailIndexEstimate& est, std::size_t n, double u, const KernelSpec& k)
{
  return hall_mef(est.A_hat, est.alpha_hat, n, u, k, BandwidthMethod::MefPlugin);
}

Bandwidth al_bandwidth(std::span<const double> sample, const KernelSpec& k)
{
  const std::size_t n = sample.size();
  if (n < 10)
    throw DomainError("global bandwidth selection needs at least 10 observations");

  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double nd = static_cast<double>(n);
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / nd;
  double ss = 0.0;
  for (double v : sorted)
    ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (nd - 1.0));
  if (!(sd > 0.0) || !std::isfinite(sd))
    throw DegenerateSampleError("sample has zero spread; global bandwidth undefined");

  // Normal-reference pilot for the Gaussian density estimate whose derivative
  // is squared and integrated.
  const double pilot = 1.06 * sd * std::pow(nd, -0.2);
  constexpr std::size_t kGrid = 1024;
  const double lo = sorted.front() - 3.0 * sd;
  const double hi = sorted.back() + 3.0 * sd;
  const double step = (hi - lo) / static_cast<double>(kGrid - 1);
  // Gaussian terms beyond 9 pilot bandwidths are below 1e-17 of the peak.
  const double reach = 9.0 * pilot;
  const double scale = 1.0 / (nd * pilot * pilot);

  double integral = 0.0;
  for (std::size_t g = 0; g < kGrid; ++g) {
    const double at = lo + step * static_cast<double>(g);
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), at - reach);
    const auto last = std::upper_bound(first, sorted.end(), at + reach);
    double deriv = 0.0;
    for (auto it = first; it != last; ++it) {
      const double z = (at - *it) / pilot;
      deriv -= z * std_normal_pdf(z);
    }
    deriv *= scale;
    const double weight = (g == 0 || g + 1 == kGrid) ? 0.5 : 1.0;
    integral += weight * deriv * deriv;
  }
  integral *= step;
  if (!(integral > 0.0) || !std::isfinite(integral))
    throw DegenerateSampleError("density roughness estimate is not positive");

  const double h = std::cbrt(2.0 * k.psi / (k.mu2 * k.mu2 * integral * nd));
  return { h, BandwidthMethod::GlobalAL, true, false };
}

Bandwidth cap_to_range(Bandwidth h, std::span<const double> sample)
{
  require_nonempty(sample);
  const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
  const double range = *mx - *mn;
  if (range > 0.0 && (!std::isfinite(h.h) || h.h > range)) {
    h.h = range;
    h.capped = true;
  }
  return h;
}

double kernel_mef(std::span<const double> sample, double u, const Bandwidth& h)
{
  require_bandwidth(h);
  require_nonempty(sample);
  double numerator = 0.0;
  double survival = 0.0;
  for (double xi : sample) {
    const double excess = xi - u;
    const double z = excess / h.h;
    const double upper = std_normal_cdf(z);
    numerator += excess * upper + h.h * std_normal_pdf(z);
    survival += upper;
  }
  const double nd = static_cast<double>(sample.size());
  survival /= nd;
  if (survival <= 1e-12)
    throw NoExceedanceError("kernel survival estimate at the threshold is zero");
  return numerator / nd / survival;
}

} // namespace tailbench

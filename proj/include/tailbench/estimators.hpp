#pragma once

#include "tailbench/kernel.hpp"
#include "tailbench/tail_index.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace tailbench {

// PI: Hall-class plug-in. PT: GPD piecing-together (tail) or GPD fit (mean
// excess). AL: kernel estimator with the global bandwidth. PB: kernel
// estimator with the plug-in Hall-class pointwise bandwidth.
enum class EstimatorTag
{
  PI,
  PT,
  AL,
  PB
};

enum class Quantity
{
  TailProbability,
  MeanExcess
};

std::string_view to_string(EstimatorTag tag);
std::optional<EstimatorTag> parse_estimator(std::string_view name);

namespace flag {
inline constexpr std::uint32_t kClamped = 1u << 0;
inline constexpr std::uint32_t kBandwidthCapped = 1u << 1;
inline constexpr std::uint32_t kBandwidthInvalid = 1u << 2;
inline constexpr std::uint32_t kInsufficientExceedances = 1u << 3;
inline constexpr std::uint32_t kNotConverged = 1u << 4;
inline constexpr std::uint32_t kBoundaryActive = 1u << 5;
inline constexpr std::uint32_t kNonfinite = 1u << 6;
inline constexpr std::uint32_t kNoExceedance = 1u << 7;
} // namespace flag

// Comma-separated names of the set flags, empty when none.
std::string describe_flags(std::uint32_t flags);

struct EstimateRecord
{
  EstimatorTag estimator;
  Quantity quantity;
  // Reported value: probabilities are clamped to [0, 1].
  double value;
  // Unclamped value used by every error metric.
  double raw;
  std::uint32_t flags = 0;
  std::map<std::string, double> diagnostics;

  bool has(std::uint32_t f) const { return (flags & f) != 0; }
};

// Kernel survival estimate 1 - F_hat(x). AL selects al_bandwidth; PB needs a
// Hill-type estimate and uses the plug-in pointwise bandwidth.
EstimateRecord tail_ne(std::span<const double> sample, double x, EstimatorTag method,
                       const std::optional<TailIndexEstimate>& tail_est = {});
EstimateRecord tail_ne_with(std::span<const double> sample, double x, EstimatorTag method, const Bandwidth& h);

// Piecing-together survival estimate (N/n) {1 - H_fit(x - u)} from an
// unconstrained POT fit at u.
EstimateRecord tail_pt(std::span<const double> sample, double x, double u);

// Plug-in survival estimate A_hat x^{-alpha_hat}.
EstimateRecord tail_pi(const TailIndexEstimate& est, double x);

// Kernel mean excess with the global or the plug-in mean-excess bandwidth.
EstimateRecord mef_ne(std::span<const double> sample, double u, EstimatorTag method,
                      const std::optional<TailIndexEstimate>& tail_est = {});
EstimateRecord mef_ne_with(std::span<const double> sample, double u, EstimatorTag method, const Bandwidth& h);

// c_fit / (1 - gamma_fit) from the gamma < 1 constrained POT fit at u.
EstimateRecord mef_pe(std::span<const double> sample, double u);

// u / (alpha_hat - 1); infinite (flagged) when alpha_hat <= 1 + 1e-6.
EstimateRecord mef_pi(const TailIndexEstimate& est, double u);

} // namespace tailbench

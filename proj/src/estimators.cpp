#include "tailbench/estimators.hpp"

#include "tailbench/errors.hpp"
#include "tailbench/gpd_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tailbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void note_bandwidth(EstimateRecord& rec, const Bandwidth& h)
{
  rec.diagnostics["h"] = h.h;
  if (h.capped)
    rec.flags |= flag::kBandwidthCapped;
  if (!h.valid)
    rec.flags |= flag::kBandwidthInvalid;
}

void note_tail_est(EstimateRecord& rec, const TailIndexEstimate& est)
{
  rec.diagnostics["alpha_hat"] = est.alpha_hat;
  rec.diagnostics["A_hat"] = est.A_hat;
  rec.diagnostics["r"] = static_cast<double>(est.r);
}

void note_fit(EstimateRecord& rec, const PotFit& fit)
{
  rec.diagnostics["gamma_hat"] = fit.params.gamma;
  rec.diagnostics["scale_hat"] = fit.params.scale;
  rec.diagnostics["loglik"] = fit.loglik;
  rec.diagnostics["N"] = static_cast<double>(fit.n_exceed);
  if (!fit.converged)
    rec.flags |= flag::kNotConverged;
  if (fit.boundary_active)
    rec.flags |= flag::kBoundaryActive;
}

const TailIndexEstimate& require_tail_est(const std::optional<TailIndexEstimate>& est)
{
  if (!est)
    throw DomainError("the PB bandwidth needs a Hill-type tail estimate");
  return *est;
}

} // namespace

std::string_view to_string(EstimatorTag tag)
{
  switch (tag) {
    case EstimatorTag::PI:
      return "PI";
    case EstimatorTag::PT:
      return "PT";
    case EstimatorTag::AL:
      return "AL";
    case EstimatorTag::PB:
      return "PB";
  }
  return "?";
}

std::optional<EstimatorTag> parse_estimator(std::string_view name)
{
  for (auto tag : { EstimatorTag::PI, EstimatorTag::PT, EstimatorTag::AL, EstimatorTag::PB })
    if (to_string(tag) == name)
      return tag;
  if (name == "PE")
    return EstimatorTag::PT;
  return std::nullopt;
}

std::string describe_flags(std::uint32_t flags)
{
  static constexpr std::pair<std::uint32_t, const char*> names[] = {
    { flag::kClamped, "clamped" },
    { flag::kBandwidthCapped, "bandwidth_capped" },
    { flag::kBandwidthInvalid, "bandwidth_invalid" },
    { flag::kInsufficientExceedances, "insufficient_exceedances" },
    { flag::kNotConverged, "not_converged" },
    { flag::kBoundaryActive, "boundary_active" },
    { flag::kNonfinite, "nonfinite" },
    { flag::kNoExceedance, "no_exceedance" },
  };
  std::string out;
  for (const auto& [bit, name] : names) {
    if ((flags & bit) == 0)
      continue;
    if (!out.empty())
      out += ',';
    out += name;
  }
  return out;
}

EstimateRecord tail_ne_with(std::span<const double> sample, double x, EstimatorTag method, const Bandwidth& h)
{
  EstimateRecord rec{ method, Quantity::TailProbability, 0.0, 0.0, 0, {} };
  note_bandwidth(rec, h);
  rec.raw = kernel_tail_raw(sample, x, h);
  rec.value = std::clamp(rec.raw, 0.0, 1.0);
  if (rec.value != rec.raw)
    rec.flags |= flag::kClamped;
  return rec;
}

EstimateRecord tail_ne(std::span<const double> sample, double x, EstimatorTag method,
                       const std::optional<TailIndexEstimate>& tail_est)
{
  switch (method) {
    case EstimatorTag::AL:
      return tail_ne_with(sample, x, method, al_bandwidth(sample));
    case EstimatorTag::PB: {
      const auto& est = require_tail_est(tail_est);
      const Bandwidth h = cap_to_range(pointwise_bandwidth_plugin(est, sample.size(), x), sample);
      EstimateRecord rec = tail_ne_with(sample, x, method, h);
      note_tail_est(rec, est);
      return rec;
    }
    default:
      throw DomainError("tail_ne accepts only the AL and PB bandwidth methods");
  }
}

EstimateRecord tail_pt(std::span<const double> sample, double x, double u)
{
  EstimateRecord rec{ EstimatorTag::PT, Quantity::TailProbability, 0.0, 0.0, 0, {} };
  const double n = static_cast<double>(sample.size());
  const std::vector<double> y = excesses_over(sample, u);
  rec.diagnostics["u"] = u;
  rec.diagnostics["N"] = static_cast<double>(y.size());
  if (y.size() < 2) {
    // Nothing to fit beyond u: the empirical tail there is empty.
    rec.flags |= flag::kInsufficientExceedances;
    return rec;
  }
  const PotFit fit = fit_excesses(y, u, false);
  note_fit(rec, fit);
  rec.raw = static_cast<double>(fit.n_exceed) / n * gpd_tail(fit.params, x - u);
  rec.value = std::clamp(rec.raw, 0.0, 1.0);
  if (!std::isfinite(rec.raw))
    rec.flags |= flag::kNonfinite;
  return rec;
}

EstimateRecord tail_pi(const TailIndexEstimate& est, double x)
{
  if (!(x > 0.0))
    throw DomainError("plug-in tail estimate requires x > 0");
  EstimateRecord rec{ EstimatorTag::PI, Quantity::TailProbability, 0.0, 0.0, 0, {} };
  note_tail_est(rec, est);
  rec.raw = est.A_hat * std::pow(x, -est.alpha_hat);
  rec.value = std::clamp(rec.raw, 0.0, 1.0);
  if (rec.value != rec.raw)
    rec.flags |= flag::kClamped;
  return rec;
}

EstimateRecord mef_ne_with(std::span<const double> sample, double u, EstimatorTag method, const Bandwidth& h)
{
  EstimateRecord rec{ method, Quantity::MeanExcess, 0.0, 0.0, 0, {} };
  note_bandwidth(rec, h);
  rec.raw = kernel_mef(sample, u, h);
  rec.value = rec.raw;
  return rec;
}

EstimateRecord mef_ne(std::span<const double> sample, double u, EstimatorTag method,
                      const std::optional<TailIndexEstimate>& tail_est)
{
  switch (method) {
    case EstimatorTag::AL:
      return mef_ne_with(sample, u, method, al_bandwidth(sample));
    case EstimatorTag::PB: {
      const auto& est = require_tail_est(tail_est);
      const Bandwidth h = cap_to_range(mef_bandwidth_plugin(est, sample.size(), u), sample);
      EstimateRecord rec = mef_ne_with(sample, u, method, h);
      note_tail_est(rec, est);
      return rec;
    }
    default:
      throw DomainError("mef_ne accepts only the AL and PB bandwidth methods");
  }
}

EstimateRecord mef_pe(std::span<const double> sample, double u)
{
  EstimateRecord rec{ EstimatorTag::PT, Quantity::MeanExcess, 0.0, 0.0, 0, {} };
  rec.diagnostics["u"] = u;
  const std::vector<double> y = excesses_over(sample, u);
  rec.diagnostics["N"] = static_cast<double>(y.size());
  if (y.size() < 2) {
    rec.flags |= flag::kInsufficientExceedances | flag::kNonfinite;
    rec.raw = rec.value = std::numeric_limits<double>::quiet_NaN();
    return rec;
  }
  const PotFit fit = fit_excesses(y, u, true);
  note_fit(rec, fit);
  rec.raw = fit.params.scale / (1.0 - fit.params.gamma);
  rec.value = rec.raw;
  if (!std::isfinite(rec.raw))
    rec.flags |= flag::kNonfinite;
  return rec;
}

EstimateRecord mef_pi(const TailIndexEstimate& est, double u)
{
  if (!(u > 0.0))
    throw DomainError("plug-in mean excess requires u > 0");
  EstimateRecord rec{ EstimatorTag::PI, Quantity::MeanExcess, 0.0, 0.0, 0, {} };
  note_tail_est(rec, est);
  if (est.alpha_hat <= 1.0 + 1e-6) {
    rec.raw = rec.value = kInf;
    rec.flags |= flag::kNonfinite;
    return rec;
  }
  rec.raw = rec.value = u / (est.alpha_hat - 1.0);
  return rec;
}

} // namespace tailbench

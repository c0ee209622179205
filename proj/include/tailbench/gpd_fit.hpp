#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace tailbench {

struct GpdParams
{
  double gamma;
  double scale;
};

// Upper bound enforced on gamma by the constrained fit.
inline constexpr double kConstrainedGammaMax = 1.0 - 1e-6;

// Below this |gamma| the exponential limit of the likelihood is used.
inline constexpr double kGammaZeroBand = 1e-8;

struct PotFit
{
  GpdParams params;
  double threshold;
  std::size_t n_exceed;
  double loglik;
  bool converged;
  bool constrained;
  // the constrained optimum sits on gamma = kConstrainedGammaMax
  bool boundary_active;
};

// Survival 1 - H_{gamma, scale}(y) of the GPD at y >= 0 (0 beyond the support).
double gpd_tail(const GpdParams& p, double y);

// -N ln c - (1 + 1/gamma) sum ln(1 + gamma y_i / c), or the exponential limit
// for |gamma| < 1e-8. Returns -inf outside the support.
double gpd_loglik(const GpdParams& p, std::span<const double> excesses);

// Analytic gradient of gpd_loglik with respect to (gamma, ln c).
std::array<double, 2> score_at(const GpdParams& p, std::span<const double> excesses);

// Maximum likelihood GPD fit to the excesses {X_i - u : X_i > u}. With
// constrain_gamma_lt_1 the shape is held below 1 - 1e-6.
// Throws InsufficientExceedancesError when fewer than two points exceed u.
PotFit fit_pot(std::span<const double> sample, double u, bool constrain_gamma_lt_1);

// fit_pot on excesses that were already extracted.
PotFit fit_excesses(std::span<const double> excesses, double u, bool constrain_gamma_lt_1);

std::vector<double> excesses_over(std::span<const double> sample, double u);

} // namespace tailbench
